//! Radon–Nikodym factor of the left translate of ν, and the constants that bound it.

use super::{a_inv, map_paths, GridDiffeo, SmoothTestMap};
use crate::scalar::{trapezoid, Real};
use crate::stats::Estimate;

pub fn schwarzian<T: Real>(g: &SmoothTestMap<T>, t: T) -> T {
    g.schwarzian(t)
}

/// `(g'(0) g'(1))^{-1/2} exp(g''/g'(0) q'(0) − g''/g'(1) q'(1) + ∫ S_g(q) q'² dt)`
pub fn density<T: Real>(g: &SmoothTestMap<T>, q: &GridDiffeo<T>) -> T {
    let (j0, j1) = (g.jet(T::zero()), g.jet(T::one()));
    let (d, v) = (q.derivs(), q.values());
    let m = q.grid();
    let integrand: Vec<T> = v.iter().zip(d).map(|(&x, &dq)| g.schwarzian(x) * dq * dq).collect();
    let exponent = j0[2] / j0[1] * d[0] - j1[2] / j1[1] * d[m] + trapezoid(&integrand);
    exponent.exp() / (j0[1] * j1[1]).sqrt()
}

/// `(f₁, f₂)` for the partition `0 < x_1 < … < x_{n-1} < 1` and one sampled `q_k` per gap.
pub fn lemma2_sums<T: Real>(g: &SmoothTestMap<T>, interior: &[T], qs: &[GridDiffeo<T>]) -> (T, T) {
    assert_eq!(qs.len(), interior.len() + 1, "one diffeomorphism per gap");
    let mut knots = Vec::with_capacity(interior.len() + 2);
    knots.push(T::zero());
    knots.extend_from_slice(interior);
    knots.push(T::one());
    let (mut f1, mut f2) = (Vec::with_capacity(qs.len()), Vec::with_capacity(qs.len()));
    for (k, q) in qs.iter().enumerate() {
        let (a, b) = (knots[k], knots[k + 1]);
        let dx = b - a;
        let m = q.grid();
        f1.push(dx * (g.log_deriv(a) * q.derivs()[0] - g.log_deriv(b) * q.derivs()[m]));
        let integrand: Vec<T> = q
            .values()
            .iter()
            .zip(q.derivs())
            .map(|(&y, &d)| g.schwarzian(a + dx * y) * d * d)
            .collect();
        f2.push(dx * dx * trapezoid(&integrand));
    }
    (crate::scalar::pairwise_sum(&f1), crate::scalar::pairwise_sum(&f2))
}

/// Moments `M_l = E[q'(1)^l]`, `E ∫ q'²`, and the derived `c₁`, `C_g`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityParams {
    /// `M_0, …, M_4`
    pub moments: Vec<Estimate>,
    pub energy: Estimate,
    pub c1: f64,
    pub c_g: f64,
}

/// Salt separating the constants stream from the other experiments.
pub(crate) const SALT_CONSTANTS: u32 = 2;

/// Grid used to maximize `C_g`.
pub const C_G_GRID: usize = 1 << 14;

pub fn constants<T: Real>(g: &SmoothTestMap<T>, samples: usize, m: usize, seed: u64) -> DensityParams {
    let per_path: Vec<(f64, f64)> = map_paths(samples, m, seed, SALT_CONSTANTS, |p| {
        let q = a_inv(p);
        let sq: Vec<T> = q.derivs().iter().map(|&d: &T| d * d).collect();
        (q.derivs()[m].as_f64(), trapezoid(&sq).as_f64())
    });
    let moments: Vec<Estimate> = (0..=4)
        .map(|l| {
            let xs: Vec<f64> = per_path.iter().map(|s| s.0.powi(l)).collect();
            Estimate::from_samples(&xs)
        })
        .collect();
    let energy = Estimate::from_samples(&per_path.iter().map(|s| s.1).collect::<Vec<_>>());
    let c1 = 1.0 + moments[1].mean + moments[2].mean + energy.mean;
    DensityParams { moments, energy, c1, c_g: g.c_g(C_G_GRID).as_f64() }
}
