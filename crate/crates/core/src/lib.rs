//! Workbench for auditing constructive objects around Thompson's group F.
//!
//! The crate is organised bottom-up:
//!
//! * [`dyadic`] exact dyadic arithmetic, the group F as PL maps and its action on
//!   partition tuples;
//! * [`counting`] the `a(n, k)` recurrence, its generating functions and the orbit
//!   enumeration it is meant to count;
//! * [`folner`] the Y / X tuple families, midpoint refinement and exact Følner ratios;
//! * [`smoothing`] the smoothing function ψ, the smooth generators `g1`, `g2` and the
//!   conjugation / Z-set audits built on them;
//! * [`wiener`] Monte Carlo for Wiener measure pushed forward to diffeomorphisms;
//! * [`glue`] the gluing map, the averaging estimator and the Hölder gauge.
//!
//! Floating point code is generic over [`Real`]; the aliases at the crate root fix
//! the scalar to `f64`, which is what every audit runs with.

pub mod counting;
pub mod dyadic;
pub mod error;
pub mod folner;
pub mod glue;
pub mod report;
pub mod scalar;
pub mod smoothing;
pub mod stats;
pub mod wiener;

pub use error::{Error, Result};
pub use scalar::Real;

pub use dyadic::{ActionOrder, Dyadic, DyadicTuple, Generator, GroupWord, PlMap};

/// Exact ratio type used by the Følner audits.
pub type Ratio = num_rational::BigRational;


pub type PsiModel = smoothing::PsiModel<f64>;
pub type SmoothGenerator = smoothing::SmoothGenerator<f64>;
pub type Path = wiener::Path<f64>;
pub type GridDiffeo = wiener::GridDiffeo<f64>;
pub type SmoothTestMap = wiener::SmoothTestMap<f64>;
pub type GlueInput = glue::GlueInput<f64>;
