//! Exact scattering diagrams on the quiver side and the seed side.
//!
//! - [`series`]: truncated multivariate series with exact rational coefficients.
//! - [`scattering`]: walls, path-ordered products, consistency and planar completion.
//! - [`quiver_dt`]: cluster scattering diagrams and DT invariants of quivers.
//! - [`hdtv`]: seed-side diagrams, curve classes and GW aggregates.
//! - [`correspondence`]: pullback along `ψ`, the comparison checks and the presets.
//!
//! ```
//! use wallcross::lattice::{Covector, DimensionVector, Quiver};
//! use wallcross::quiver_dt::dt_invariants;
//! use wallcross::series::qi;
//!
//! let r = dt_invariants(&Quiver::kronecker(1), &DimensionVector::new(&[1, 1]), &Covector::from_ints(&[1, -1]), 6).unwrap();
//! assert_eq!(r.omega, qi(1));
//! ```

pub mod correspondence;
pub mod error;
pub mod hdtv;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod quiver_dt;
pub mod scattering;
pub mod series;
pub mod svg;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/scattering.md")]
    mod scattering {}
    #[doc = include_str!("../../../book/src/dt_invariants.md")]
    mod dt_invariants {}
    #[doc = include_str!("../../../book/src/seed_side.md")]
    mod seed_side {}
    #[doc = include_str!("../../../book/src/correspondence.md")]
    mod correspondence {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
