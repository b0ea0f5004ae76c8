//! Monte Carlo engine for the Wiener measure on `C₀([0, 1])` and its
//! pushforward to diffeomorphisms under `A⁻¹(ξ)(t) = ∫₀ᵗ e^ξ / ∫₀¹ e^ξ`.
//!
//! Every path is drawn from its own ChaCha stream keyed by `(seed, salt, index)`,
//! and reductions use pairwise sums, so estimates are bit-identical for a fixed
//! seed whatever the thread count.

mod density;
mod experiments;
mod testmap;

pub use density::{constants, density, lemma2_sums, schwarzian, DensityParams};
pub use experiments::{
    concentration_test, lemma3_study, moment_test, moment_tests, quasi_invariance_suite, quasi_invariance_test,
    telescoping_product, Functional, Lemma2Config, Lemma2Report, Lemma3Report, MomentReport,
    QuasiReport, REVERSAL_TOL, WIENER_HEADERS,
};
pub use testmap::SmoothTestMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{cumulative_trapezoid, Real};

/// Brownian path sampled at `t_i = i / M`, `i = 0..=M`.
#[derive(Clone, Debug, PartialEq)]
pub struct Path<T> {
    values: Vec<T>,
}

impl<T: Real> Path<T> {
    /// Requires `values[0] == 0`, finite entries and `len - 1` a power of two.
    pub fn new(values: Vec<T>) -> Result<Self> {
        check_grid(values.len())?;
        if values[0] != T::zero() {
            return Err(Error::InvalidInput("path must start at 0".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("path has non-finite entries".into()));
        }
        Ok(Path { values })
    }

    pub fn zero(m: usize) -> Self {
        Path { values: vec![T::zero(); m + 1] }
    }

    /// `ξ(t) = c t`
    pub fn linear(m: usize, c: T) -> Self {
        let mf = T::from_usize_lossy(m);
        Path { values: (0..=m).map(|i| c * T::from_usize_lossy(i) / mf).collect() }
    }

    pub fn grid(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `ζ(t) = ξ(1 − t) − ξ(1)`; its diffeomorphism is `t ↦ 1 − q(1 − t)`.
    pub fn reverse(&self) -> Self {
        let last = *self.values.last().expect("nonempty");
        Path { values: self.values.iter().rev().map(|&v| v - last).collect() }
    }
}

fn check_grid(len: usize) -> Result<()> {
    if len < 2 || !(len - 1).is_power_of_two() {
        return Err(Error::InvalidInput(format!("grid size {} is not a power of two", len.max(1) - 1)));
    }
    Ok(())
}

/// RNG for path `index` of the experiment tagged `salt`.
pub fn path_rng(seed: u64, salt: u32, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((salt as u64) << 48) ^ index);
    rng
}

/// Standard Brownian motion on `M + 1` grid points: steps `N(0, 1/M)`.
pub fn sample_brownian<T: Real>(m: usize, seed: u64) -> Result<Path<T>> {
    check_grid(m + 1)?;
    Ok(brownian_from(m, &mut path_rng(seed, 0, 0)))
}

pub(crate) fn brownian_from<T: Real, R: Rng>(m: usize, rng: &mut R) -> Path<T> {
    let sd = (1.0 / m as f64).sqrt();
    let mut values = Vec::with_capacity(m + 1);
    let mut acc = 0.0f64;
    values.push(T::zero());
    for _ in 0..m {
        let z: f64 = rng.sample(StandardNormal);
        acc += sd * z;
        values.push(T::lit(acc));
    }
    Path { values }
}

/// `f(i, path_i)` for `samples` independent paths, in index order.
pub(crate) fn map_paths<T, R, F>(samples: usize, m: usize, seed: u64, salt: u32, f: F) -> Vec<R>
where
    T: Real,
    R: Send,
    F: Fn(&Path<T>) -> R + Sync,
{
    (0..samples)
        .into_par_iter()
        .map(|i| f(&brownian_from(m, &mut path_rng(seed, salt, i as u64))))
        .collect()
}

/// Increasing diffeomorphism sampled with its derivative on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDiffeo<T> {
    values: Vec<T>,
    derivs: Vec<T>,
}

impl<T: Real> GridDiffeo<T> {
    /// Requires `q(0) = 0`, `q(1) = 1`, strictly increasing values and positive derivatives.
    pub fn new(values: Vec<T>, derivs: Vec<T>) -> Result<Self> {
        check_grid(values.len())?;
        if derivs.len() != values.len() {
            return Err(Error::InvalidInput("value and derivative grids differ".into()));
        }
        if values[0] != T::zero() || *values.last().unwrap() != T::one() {
            return Err(Error::InvalidInput("diffeomorphism must fix 0 and 1".into()));
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("values not strictly increasing".into()));
        }
        if derivs.iter().any(|d| !(*d > T::zero()) || !d.is_finite()) {
            return Err(Error::InvalidInput("derivatives must be positive".into()));
        }
        Ok(GridDiffeo { values, derivs })
    }

    pub fn identity(m: usize) -> Self {
        let mf = T::from_usize_lossy(m);
        GridDiffeo {
            values: (0..=m).map(|i| T::from_usize_lossy(i) / mf).collect(),
            derivs: vec![T::one(); m + 1],
        }
    }

    /// Samples of a closed-form map.
    pub fn from_map(g: &SmoothTestMap<T>, m: usize) -> Self {
        let mf = T::from_usize_lossy(m);
        let (values, derivs) = (0..=m)
            .map(|i| {
                let j = g.jet(T::from_usize_lossy(i) / mf);
                (j[0], j[1])
            })
            .unzip();
        GridDiffeo { values, derivs }
    }

    pub fn grid(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn derivs(&self) -> &[T] {
        &self.derivs
    }

    /// `(value, derivative)` at `t` by cubic Hermite interpolation.
    pub fn eval_with_deriv(&self, t: T) -> (T, T) {
        let m = self.grid();
        let mf = T::from_usize_lossy(m);
        let x = (t.max(T::zero()).min(T::one())) * mf;
        let i = x.floor().to_usize().unwrap_or(0).min(m - 1);
        let s = x - T::from_usize_lossy(i);
        let h = T::one() / mf;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.derivs[i] * h, self.derivs[i + 1] * h);
        let (two, three) = (T::lit(2.0), T::lit(3.0));
        let s2 = s * s;
        let s3 = s2 * s;
        let v = (two * s3 - three * s2 + T::one()) * y0
            + (s3 - two * s2 + s) * d0
            + (three * s2 - two * s3) * y1
            + (s3 - s2) * d1;
        let dv = (T::lit(6.0) * s2 - T::lit(6.0) * s) * y0
            + (three * s2 - T::lit(4.0) * s + T::one()) * d0
            + (T::lit(6.0) * s - T::lit(6.0) * s2) * y1
            + (three * s2 - two * s) * d1;
        (v, dv * mf)
    }

    pub fn eval(&self, t: T) -> T {
        self.eval_with_deriv(t).0
    }

    /// Grid samples of `g⁻¹ ∘ q`.
    pub fn pull_back(&self, g: &SmoothTestMap<T>) -> Self {
        let (values, derivs) = self
            .values
            .iter()
            .zip(&self.derivs)
            .map(|(&y, &d)| {
                let x = g.inverse(y);
                (x, d / g.deriv(x))
            })
            .unzip();
        GridDiffeo { values, derivs }
    }
}

/// `A(q)(t) = ln q'(t) − ln q'(0)`
pub fn a_map<T: Real>(q: &GridDiffeo<T>) -> Path<T> {
    let l0 = q.derivs[0].ln();
    let mut values: Vec<T> = q.derivs.iter().map(|d| d.ln() - l0).collect();
    values[0] = T::zero();
    Path { values }
}

/// `A⁻¹(ξ)`, integrating `e^ξ` by the trapezoid rule.
pub fn a_inv<T: Real>(xi: &Path<T>) -> GridDiffeo<T> {
    let e: Vec<T> = xi.values.iter().map(|v| v.exp()).collect();
    let cum = cumulative_trapezoid(&e);
    let total = *cum.last().unwrap();
    GridDiffeo {
        values: cum.iter().map(|&c| c / total).collect(),
        derivs: e.iter().map(|&v| v / total).collect(),
    }
}

/// `(q'(0), q'(1))` for `q = A⁻¹(ξ)`.
pub fn endpoint_derivatives<T: Real>(xi: &Path<T>) -> (T, T) {
    let q = a_inv(xi);
    (q.derivs[0], *q.derivs.last().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Estimate;
    use proptest::prelude::*;

    #[test]
    fn brownian_basics() {
        let p: Path<f64> = sample_brownian(256, 7).unwrap();
        assert_eq!(p.values()[0], 0.0);
        assert_eq!(p.grid(), 256);
        assert!(sample_brownian::<f64>(100, 7).is_err());
        assert_eq!(p, sample_brownian(256, 7).unwrap());
    }

    #[test]
    fn brownian_variance_and_covariance() {
        let n = 100_000;
        let ends: Vec<(f64, f64)> = map_paths(n, 64, 11, 1, |p: &Path<f64>| (p.values()[32], p.values()[64]));
        let v1: Vec<f64> = ends.iter().map(|e| e.1 * e.1).collect();
        let cov: Vec<f64> = ends.iter().map(|e| e.0 * e.1).collect();
        let (ev, ec) = (Estimate::from_samples(&v1), Estimate::from_samples(&cov));
        assert!((ev.mean - 1.0).abs() <= 4.0 * ev.se, "{ev:?}");
        assert!((ec.mean - 0.5).abs() <= 4.0 * ec.se, "{ec:?}");
    }

    #[test]
    fn trivial_maps() {
        let z = Path::<f64>::zero(64);
        assert_eq!(a_inv(&z), GridDiffeo::identity(64));
        assert_eq!(a_map(&GridDiffeo::<f64>::identity(64)), z);
        assert_eq!(endpoint_derivatives(&z), (1.0, 1.0));
    }

    #[test]
    fn linear_path_closed_form() {
        for c in [0.5f64, -1.0, 2.0] {
            let (d0, d1) = endpoint_derivatives(&Path::linear(4096, c));
            let e = c.exp_m1();
            assert!((d0 - c / e).abs() < 1e-7, "c={c}");
            assert!((d1 - c * c.exp() / e).abs() < 1e-7, "c={c}");
        }
    }

    #[test]
    fn reversal_swaps_endpoint_derivatives() {
        for seed in 0..20 {
            let p: Path<f64> = sample_brownian(1024, seed).unwrap();
            let (a0, a1) = endpoint_derivatives(&p);
            let (b0, b1) = endpoint_derivatives(&p.reverse());
            assert!(((b0 - a1) / a1).abs() < 1e-12);
            assert!(((b1 - a0) / a0).abs() < 1e-12);
            for (x, y) in p.reverse().reverse().values().iter().zip(p.values()) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn roundtrip_is_second_order() {
        let err = |m: usize| {
            let mut worst = 0.0f64;
            for g in [SmoothTestMap::Exp { a: 1.3f64 }, SmoothTestMap::Poly { c: 0.4 }, SmoothTestMap::Mobius { c: 2.5 }] {
                let q = GridDiffeo::from_map(&g, m);
                let r = a_inv(&a_map(&q));
                for (x, y) in q.values().iter().zip(r.values()) {
                    worst = worst.max((x - y).abs());
                }
            }
            worst
        };
        let (e1, e2) = (err(4096), err(8192));
        assert!(e1 < 1e-8, "{e1}");
        assert!(e1 / e2 > 3.5, "{e1} {e2}");
    }

    #[test]
    fn hermite_reproduces_closed_form() {
        let g = SmoothTestMap::Exp { a: 0.7f64 };
        let q = GridDiffeo::from_map(&g, 256);
        for t in [0.0, 0.013, 0.5, 0.77, 1.0] {
            let (v, d) = q.eval_with_deriv(t);
            assert!((v - g.eval(t)).abs() < 1e-10);
            assert!((d - g.deriv(t)).abs() < 1e-6);
        }
        let back = q.pull_back(&g);
        for (i, v) in back.values().iter().enumerate() {
            assert!((v - i as f64 / 256.0).abs() < 1e-14);
            assert!((back.derivs()[i] - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn validation() {
        assert!(GridDiffeo::new(vec![0.0, 0.6, 1.0], vec![1.0; 3]).is_ok());
        assert!(GridDiffeo::new(vec![0.0, 1.2, 1.0], vec![1.0; 3]).is_err());
        assert!(GridDiffeo::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.0, 1.0]).is_err());
        assert!(Path::new(vec![1.0, 0.0]).is_err());
        assert!(Path::new(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let p: Path<f32> = sample_brownian(128, 3).unwrap();
        let q = a_inv(&p);
        assert_eq!(*q.values().last().unwrap(), 1.0f32);
        assert!(GridDiffeo::new(q.values().to_vec(), q.derivs().to_vec()).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn a_inv_is_a_diffeo(seed in any::<u64>(), k in 3u32..11) {
            let p: Path<f64> = sample_brownian(1 << k, seed).unwrap();
            let q = a_inv(&p);
            prop_assert!(GridDiffeo::new(q.values().to_vec(), q.derivs().to_vec()).is_ok());
            let back = a_map(&q);
            for (x, y) in back.values().iter().zip(p.values()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
