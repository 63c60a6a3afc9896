//! JSON input formats for quivers, seeds and presets.
//!
//! Vertices are 1-based in files and 0-based in memory.

use serde::{Deserialize, Serialize};

use crate::correspondence::Preset;
use crate::error::{Error, Result};
use crate::lattice::{smooth_fan, Quiver, SymplecticSeed};
use crate::linalg;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverFile {
    pub vertices: usize,
    /// `[from, to, count]`, 1-based.
    pub arrows: Vec<[usize; 3]>,
    pub trivial_attractor: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
}

impl QuiverFile {
    pub fn to_quiver(&self) -> Result<Quiver> {
        let mut arrows = Vec::with_capacity(self.arrows.len());
        for (k, &[from, to, count]) in self.arrows.iter().enumerate() {
            if from == 0 || to == 0 {
                return Err(Error::Invalid(format!("arrows[{k}]: vertices are 1-based")));
            }
            if from == to {
                return Err(Error::Invalid(format!("arrows[{k}]: loops are not allowed")));
            }
            arrows.push((from - 1, to - 1, count as u32));
        }
        let mut q = Quiver::from_arrows(self.vertices, &arrows, self.trivial_attractor)?;
        q.citation = self.citation.clone();
        Ok(q)
    }

    pub fn from_quiver(q: &Quiver) -> Self {
        let n = q.vertex_count();
        let mut arrows = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let c = q.arrow_count(i, j);
                if c > 0 {
                    arrows.push([i + 1, j + 1, c as usize]);
                }
            }
        }
        QuiverFile { vertices: n, arrows, trivial_attractor: q.trivial_attractor, citation: q.citation.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedFile {
    pub rank: usize,
    pub e_vectors: Vec<Vec<i64>>,
    pub omega: Vec<Vec<i64>>,
    /// Counterclockwise primitive rays; when absent, the smooth fan through the `v_i` and the axes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fan_rays: Option<Vec<[i64; 2]>>,
}

impl SeedFile {
    pub fn to_seed(&self) -> Result<SymplecticSeed> {
        let mut s = SymplecticSeed { rank: self.rank, e_vectors: self.e_vectors.clone(), omega: self.omega.clone(), fan_rays: vec![] };
        s.fan_rays = match &self.fan_rays {
            Some(r) => r.clone(),
            None => {
                if self.rank != 2 || self.omega.len() != 2 || self.e_vectors.iter().any(|e| e.len() != 2) {
                    return Err(Error::Invalid("fan_rays can only be derived for rank-2 seeds".into()));
                }
                let rays: Vec<[i64; 2]> = (0..s.t_count())
                    .map(|i| {
                        let v = linalg::primitive(&s.v(i));
                        [v[0], v[1]]
                    })
                    .collect();
                smooth_fan(&rays)
            }
        };
        Ok(s)
    }

    pub fn from_seed(s: &SymplecticSeed) -> Self {
        SeedFile { rank: s.rank, e_vectors: s.e_vectors.clone(), omega: s.omega.clone(), fan_rays: Some(s.fan_rays.clone()) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiFile {
    /// `rank(N) × |Q_0|` matrix whose columns are `ψ(s_j)`.
    pub matrix: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetFile {
    pub name: String,
    pub quiver: QuiverFile,
    pub seed: SeedFile,
    pub psi: PsiFile,
}

impl PresetFile {
    pub fn to_preset(&self) -> Result<Preset> {
        let quiver = self.quiver.to_quiver()?;
        let seed = self.seed.to_seed()?;
        let p = Preset::new(&self.name, quiver, seed)?;
        if p.psi.matrix != self.psi.matrix {
            return Err(Error::Invalid(format!(
                "psi.matrix {:?} differs from ψ(s_i) = e_i, which is {:?}",
                self.psi.matrix, p.psi.matrix
            )));
        }
        Ok(p)
    }

    pub fn from_preset(p: &Preset) -> Self {
        PresetFile {
            name: p.name.clone(),
            quiver: QuiverFile::from_quiver(&p.quiver),
            seed: SeedFile::from_seed(&p.seed),
            psi: PsiFile { matrix: p.psi.matrix.clone() },
        }
    }
}

/// Parse JSON text, reporting line and column on failure.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("{what}: {e} (line {}, column {})", e.line(), e.column())))
}

/// A quiver file, or the `quiver` field of a preset file.
pub fn parse_quiver(text: &str) -> Result<Quiver> {
    let v: serde_json::Value = parse(text, "quiver file")?;
    match v.get("quiver") {
        Some(q) => serde_json::from_value::<QuiverFile>(q.clone()).map_err(|e| Error::Invalid(format!("quiver: {e}")))?.to_quiver(),
        None => parse::<QuiverFile>(text, "quiver file")?.to_quiver(),
    }
}

/// A seed file, or the `seed` field of a preset file.
pub fn parse_seed(text: &str) -> Result<SymplecticSeed> {
    let v: serde_json::Value = parse(text, "seed file")?;
    match v.get("seed") {
        Some(s) => serde_json::from_value::<SeedFile>(s.clone()).map_err(|e| Error::Invalid(format!("seed: {e}")))?.to_seed(),
        None => parse::<SeedFile>(text, "seed file")?.to_seed(),
    }
}

pub fn parse_preset(text: &str) -> Result<Preset> {
    parse::<PresetFile>(text, "preset file")?.to_preset()
}
