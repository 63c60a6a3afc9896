use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use wallcross::correspondence::{
    self, local_p2_sheaf_dt, main_gammas, pullback_with, verify_comparison, verify_main, Preset, PullbackRule, SeedRoute,
};
use wallcross::hdtv::{curve_class, gw_combination, gw_json, hdtv_diagram, split_in_out};
use wallcross::io::{self, PresetFile};
use wallcross::lattice::{Covector, DimensionVector};
use wallcross::quiver_dt::{initial_cluster_diagram, DtEngine};
use wallcross::scattering::{certified_point, Diagram};
use wallcross::series::Q;
use wallcross::{svg, Error};

#[derive(Parser)]
#[command(name = "wallcross", version, about = "Exact scattering diagrams and DT invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed of the stream that proposes generic sample points.
    #[arg(long, global = true, default_value_t = 0)]
    sample_seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Complete the initial diagram of a quiver or a seed and dump it.
    Complete {
        #[arg(long, conflicts_with = "seed", required_unless_present = "seed")]
        quiver: Option<PathBuf>,
        #[arg(long)]
        seed: Option<PathBuf>,
        #[arg(long, value_parser = parse_order)]
        order: u32,
    },
    /// DT invariants of a dimension vector at a stability parameter.
    Dt {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        gamma: String,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long, value_parser = parse_order)]
        order: u32,
    },
    /// Seed-side diagram, incoming/outgoing split, curve classes and GW aggregates.
    Hdtv {
        #[arg(long)]
        seed: PathBuf,
        #[arg(long, value_parser = parse_order)]
        order: u32,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long = "A")]
        a: Option<String>,
        /// Number of certified random points to split at when no point is given.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Pull the completed cluster diagram of a preset back to the seed side.
    Pullback {
        #[arg(long)]
        preset: String,
        #[arg(long, value_parser = parse_order)]
        order: u32,
        /// Use the term-by-term rule instead of the matched one.
        #[arg(long)]
        literal: bool,
    },
    /// Check the comparison or the main identity on a preset.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// Rational DT invariant of a sheaf class on local P².
    Localp2 {
        #[arg(long, allow_hyphen_values = true)]
        chern: String,
        #[arg(long, value_parser = parse_order)]
        order: u32,
    },
    /// Render a diagram dump, or a preset's completed diagram, as SVG.
    Export {
        #[arg(long, required = true)]
        svg: bool,
        #[arg(long, conflicts_with = "preset")]
        diagram: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, value_enum, default_value_t = Side::Seed)]
        side: Side,
        #[arg(long, value_parser = parse_order, default_value_t = 4)]
        order: u32,
        #[arg(long, default_value_t = 3)]
        label_terms: usize,
    },
    /// Write the shipped preset files into a directory.
    Presets {
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum Check {
    Comparison {
        #[arg(long)]
        preset: String,
        #[arg(long, value_parser = parse_order)]
        order: u32,
    },
    Main {
        #[arg(long)]
        preset: String,
        /// JSON list of dimension vectors; defaults to all admissible classes up to the order.
        #[arg(long)]
        gammas: Option<PathBuf>,
        #[arg(long, value_parser = parse_order)]
        order: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Quiver,
    Seed,
}

enum Outcome {
    Done(String),
    /// Verification ran and an assertion failed.
    Failed(String),
}

fn parse_order(s: &str) -> std::result::Result<u32, String> {
    match s.parse::<u32>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(format!("order must be a positive integer, got `{s}`")),
    }
}

fn parse_ints(s: &str, what: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().with_context(|| format!("{what}: `{t}` is not an integer")))
        .collect()
}

fn parse_rationals(s: &str, what: &str) -> Result<Vec<Q>> {
    s.split(',')
        .map(|t| t.trim().parse::<Q>().map_err(|_| anyhow!("{what}: `{t}` is not a rational number")))
        .collect()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// A preset by name, or a preset file.
fn load_preset(s: &str) -> Result<Preset> {
    if s.ends_with(".json") {
        Ok(io::parse_preset(&read(Path::new(s))?)?)
    } else {
        Ok(correspondence::preset(s)?)
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn dump(d: &Diagram) -> Result<Value> {
    Ok(d.canonical()?.to_json())
}

fn run(cli: &Cli) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.sample_seed);
    let out = match &cli.command {
        Command::Complete { quiver, seed, order } => {
            let d = match (quiver, seed) {
                (Some(q), _) => initial_cluster_diagram(&io::parse_quiver(&read(q)?)?, *order)?.complete(*order)?,
                (None, Some(s)) => hdtv_diagram(&io::parse_seed(&read(s)?)?, *order)?,
                _ => bail!("one of --quiver or --seed is required"),
            };
            pretty(&dump(&d)?)
        }
        Command::Dt { quiver, gamma, theta, order } => {
            let q = io::parse_quiver(&read(quiver)?)?;
            let g = DimensionVector::new(&parse_ints(gamma, "--gamma")?);
            let t = Covector(parse_rationals(theta, "--theta")?);
            let rec = DtEngine::new(q)?.dt_invariants(&g, &t, *order)?;
            pretty(&rec.to_json())
        }
        Command::Hdtv { seed, order, point, a, samples } => {
            let s = io::parse_seed(&read(seed)?)?;
            let d = hdtv_diagram(&s, *order)?;
            let mut points: Vec<Vec<i64>> = Vec::new();
            if let Some(p) = point {
                points.push(parse_ints(p, "--point")?);
            } else {
                for _ in 0..*samples {
                    points.push(certified_point(&[&d], &mut rng, 9)?);
                }
            }
            let a = a.as_deref().map(|t| parse_ints(t, "--A")).transpose()?;
            let mut splits = Vec::new();
            for x in &points {
                let (fin, fout) = split_in_out(&d, x)?;
                let mut entry = json!({ "point": x, "f_in": fin.to_json(), "f_out": fout.to_json() });
                if let Some(a) = &a {
                    match curve_class(&s, a, x) {
                        Ok(r) => entry["curve_class"] = r.to_json(),
                        Err(e @ Error::Domain(_)) if point.is_none() => entry["curve_class"] = json!({ "error": e.to_string() }),
                        Err(e) => return Err(e.into()),
                    }
                    match gw_combination(&s, &d, a, x) {
                        Ok(v) => entry["gw"] = gw_json(a, x, &v),
                        Err(e @ Error::Hypothesis(_)) => entry["gw"] = json!({ "error": e.to_string() }),
                        Err(e) => return Err(e.into()),
                    }
                }
                splits.push(entry);
            }
            pretty(&json!({ "diagram": dump(&d)?, "points": splits }))
        }
        Command::Pullback { preset, order, literal } => {
            let p = load_preset(preset)?;
            let qd = initial_cluster_diagram(&p.quiver, *order)?.complete(*order)?.remove_central_walls()?;
            let rule = if *literal { PullbackRule::Literal } else { PullbackRule::Matched };
            pretty(&dump(&pullback_with(&qd, &p, rule)?)?)
        }
        Command::Verify { check: Check::Comparison { preset, order } } => {
            let r = verify_comparison(&load_preset(preset)?, *order)?;
            let text = pretty(&r.to_json());
            return Ok(if r.passed() { Outcome::Done(text) } else { Outcome::Failed(text) });
        }
        Command::Verify { check: Check::Main { preset, gammas, order } } => {
            let p = load_preset(preset)?;
            let gs: Vec<Vec<i64>> = match gammas {
                Some(f) => io::parse(&read(f)?, "gammas file")?,
                None => main_gammas(&p.quiver, *order),
            };
            let r = verify_main(&p, &gs, *order)?;
            let text = pretty(&r.to_json());
            return Ok(if r.passed() { Outcome::Done(text) } else { Outcome::Failed(text) });
        }
        Command::Localp2 { chern, order } => {
            let v = parse_ints(chern, "--chern")?;
            if v.len() != 3 {
                bail!("--chern expects r,d,chi");
            }
            let route = SeedRoute::new(&correspondence::local_p2()?, *order)?;
            pretty(&local_p2_sheaf_dt(&route, v[0], v[1], v[2])?.to_json())
        }
        Command::Export { svg: _, diagram, preset, side, order, label_terms } => {
            let d = match (diagram, preset) {
                (Some(f), _) => {
                    let v: Value = io::parse(&read(f)?, "diagram file")?;
                    Diagram::from_json(&v)?
                }
                (None, Some(p)) => {
                    let p = load_preset(p)?;
                    match side {
                        Side::Quiver => initial_cluster_diagram(&p.quiver, *order)?.complete(*order)?,
                        Side::Seed => hdtv_diagram(&p.seed, *order)?,
                    }
                }
                _ => bail!("one of --diagram or --preset is required"),
            };
            svg::render(&d.canonical()?, *label_terms)?
        }
        Command::Presets { dir } => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let mut written = Vec::new();
            for name in correspondence::PRESET_NAMES {
                let p = correspondence::preset(name)?;
                let path = dir.join(format!("{name}.json"));
                let v = serde_json::to_value(PresetFile::from_preset(&p))?;
                fs::write(&path, pretty(&v)).with_context(|| format!("cannot write {}", path.display()))?;
                written.push(path.display().to_string());
            }
            pretty(&json!({ "written": written }))
        }
    };
    Ok(Outcome::Done(out))
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = run(&cli).and_then(|o| match o {
        Outcome::Done(t) => emit(&cli, &t).map(|_| ExitCode::SUCCESS),
        Outcome::Failed(t) => emit(&cli, &t).map(|_| ExitCode::from(2)),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
