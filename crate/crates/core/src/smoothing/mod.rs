//! The smoothing function ψ and the smooth realisation of F by `g1`, `g2`.

pub mod psi;

pub use psi::{invariant_suite, PsiInvariants, PsiModel};
pub mod generators;

pub use generators::{chart_points, phi, SmoothGenerator, Which};
pub mod lemma6;
pub mod lemma7;
pub mod condition_b;
