//! The smoothing function ψ: ℝ → ℝ with `ψ(t+1) = ψ(t) + 2`, `0 < ψ' <= 3`,
//! `ψ' = 3` on `[1/4, 3/4]`, `ψ(1/4) = 1/4` and `ψ' ≡ 1` near the integers.
//!
//! On `[0, 1/4]`, in the variable `x = 4s`, `ψ'(s) = exp(ln 3 · S(x) − c · B(x))` where
//! `S` is a flat step rising on `[0.8, 1]` and `B` a flat bump on `[0.1, 0.8]`;
//! `c` is calibrated so that `∫_0^{1/4} ψ' = 1/4`. The profile is mirrored on
//! `[3/4, 1]`, which makes ψ odd.

use crate::error::{Error, Result};
use crate::scalar::Real;

const GL_NODES: [f64; 4] =
    [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_WEIGHTS: [f64; 4] =
    [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

const STEP_START: f64 = 0.8;
const BUMP_START: f64 = 0.1;
const BUMP_END: f64 = 0.8;

/// `exp(-1/y)` for `y > 0`, zero otherwise.
fn flat<T: Real>(y: T) -> T {
    if y <= T::zero() {
        T::zero()
    } else {
        (-y.recip()).exp()
    }
}

/// Smooth step, 0 for `y <= 0` and 1 for `y >= 1`, all derivatives vanishing at both ends.
pub fn flat_step<T: Real>(y: T) -> T {
    if y <= T::zero() {
        T::zero()
    } else if y >= T::one() {
        T::one()
    } else {
        let a = flat(y);
        a / (a + flat(T::one() - y))
    }
}

/// Smooth bump supported on `(0, 1)` with peak 1 at `y = 1/2`.
pub fn flat_bump<T: Real>(y: T) -> T {
    if y <= T::zero() || y >= T::one() {
        T::zero()
    } else {
        (T::lit(4.0) - (y * (T::one() - y)).recip()).exp()
    }
}

/// Gauss–Legendre (8 nodes) on `[a, b]`.
fn gl8<T: Real>(a: T, b: T, f: impl Fn(T) -> T) -> T {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let mut acc = T::zero();
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        let dx = half * T::lit(*x);
        acc = acc + T::lit(w) * (f(mid - dx) + f(mid + dx));
    }
    acc * half
}

/// Calibrated model of ψ.
#[derive(Clone, Debug)]
pub struct PsiModel<T: Real> {
    c: T,
    /// cell width in `s` on `[0, 1/4]`
    width: T,
    /// `cum[i] = ∫_0^{i·width} ψ'`
    cum: Vec<T>,
}

impl<T: Real> PsiModel<T> {
    /// `resolution` quadrature cells on `[0, 1/4]`; the integral constraint is met to `tol`.
    pub fn build(resolution: usize, tol: T) -> Result<Self> {
        if resolution < 1 << 10 {
            return Err(Error::InvalidInput("ψ resolution must be at least 2^10".into()));
        }
        let width = T::lit(0.25) / T::from_usize_lossy(resolution);
        let c = calibrate(resolution, width, tol)?;
        let mut cum = Vec::with_capacity(resolution + 1);
        let mut acc = T::zero();
        cum.push(acc);
        for i in 0..resolution {
            let a = width * T::from_usize_lossy(i);
            acc = acc + gl8(a, a + width, |s| profile(c, s));
            cum.push(acc);
        }
        let model = PsiModel { c, width, cum };
        let end = *model.cum.last().unwrap();
        if (end - T::lit(0.25)).abs() > tol {
            return Err(Error::Calibration(format!("ψ(1/4) = {end}")));
        }
        Ok(model)
    }

    pub fn calibration_constant(&self) -> T {
        self.c
    }

    pub fn resolution(&self) -> usize {
        self.cum.len() - 1
    }

    /// ψ'(t) for any real `t`.
    pub fn deriv(&self, t: T) -> T {
        let s = t - t.floor();
        let quarter = T::lit(0.25);
        if s <= quarter {
            profile(self.c, s)
        } else if s < T::lit(0.75) {
            T::lit(3.0)
        } else {
            profile(self.c, T::one() - s)
        }
    }

    /// `∫_0^s ψ'` for `s` in `[0, 1/4]`.
    fn head(&self, s: T) -> T {
        let n = self.resolution();
        let i = (s / self.width).floor().to_usize().unwrap_or(0).min(n - 1);
        let a = self.width * T::from_usize_lossy(i);
        self.cum[i] + gl8(a, s, |u| profile(self.c, u))
    }

    /// ψ on `[0, 1)`.
    fn unit(&self, s: T) -> T {
        let quarter = T::lit(0.25);
        if s <= quarter {
            self.head(s)
        } else if s < T::lit(0.75) {
            quarter + T::lit(3.0) * (s - quarter)
        } else {
            T::lit(2.0) - self.head(T::one() - s)
        }
    }

    pub fn eval(&self, t: T) -> T {
        let n = t.floor();
        T::lit(2.0) * n + self.unit(t - n)
    }

    /// Solves `head(s) = y` for `y` in `[0, 1/4]`.
    fn head_inverse(&self, y: T) -> T {
        let n = self.resolution();
        let i = self.cum.partition_point(|v| *v <= y).clamp(1, n) - 1;
        let (mut lo, mut hi) = (self.width * T::from_usize_lossy(i), self.width * T::from_usize_lossy(i + 1));
        let mut s = lo + (hi - lo) * (y - self.cum[i]) / (self.cum[i + 1] - self.cum[i]);
        for _ in 0..60 {
            let f = self.head(s) - y;
            if f == T::zero() {
                return s;
            }
            if f > T::zero() {
                hi = s;
            } else {
                lo = s;
            }
            let mut next = s - f / profile(self.c, s);
            if !(next > lo && next < hi) {
                next = (lo + hi) * T::lit(0.5);
            }
            if (next - s).abs() <= T::epsilon() * T::lit(4.0) * s.abs().max(T::min_positive_value()) {
                return next;
            }
            s = next;
        }
        s
    }

    pub fn inverse(&self, y: T) -> T {
        let two = T::lit(2.0);
        let n = (y / two).floor();
        let r = y - two * n;
        let quarter = T::lit(0.25);
        let s = if r <= quarter {
            self.head_inverse(r)
        } else if r < T::lit(1.75) {
            quarter + (r - quarter) / T::lit(3.0)
        } else {
            T::one() - self.head_inverse(two - r)
        };
        n + s
    }

    /// `ψ^j(t)`; negative `j` iterates the inverse.
    pub fn iter(&self, j: i32, t: T) -> T {
        let mut x = t;
        if j >= 0 {
            for _ in 0..j {
                x = self.eval(x);
            }
        } else {
            for _ in 0..-j {
                x = self.inverse(x);
            }
        }
        x
    }

    /// `(ψ^j(t), (ψ^j)'(t))` by the chain rule.
    pub fn iter_with_deriv(&self, j: i32, t: T) -> (T, T) {
        let mut x = t;
        let mut d = T::one();
        if j >= 0 {
            for _ in 0..j {
                d = d * self.deriv(x);
                x = self.eval(x);
            }
        } else {
            for _ in 0..-j {
                x = self.inverse(x);
                d = d / self.deriv(x);
            }
        }
        (x, d)
    }
}

/// ψ' on `[0, 1/4]`.
fn profile<T: Real>(c: T, s: T) -> T {
    let x = T::lit(4.0) * s;
    let step = flat_step((x - T::lit(STEP_START)) / T::lit(1.0 - STEP_START));
    let bump = flat_bump((x - T::lit(BUMP_START)) / T::lit(BUMP_END - BUMP_START));
    (T::lit(3f64.ln()) * step - c * bump).exp().min(T::lit(3.0))
}

/// `(∫_0^{1/4} ψ', -∫_0^{1/4} B ψ')` for a trial constant.
fn integral<T: Real>(resolution: usize, width: T, c: T) -> (T, T) {
    let mut v = Vec::with_capacity(resolution);
    let mut dv = Vec::with_capacity(resolution);
    for i in 0..resolution {
        let a = width * T::from_usize_lossy(i);
        v.push(gl8(a, a + width, |s| profile(c, s)));
        dv.push(gl8(a, a + width, |s| {
            let x = T::lit(4.0) * s;
            -flat_bump((x - T::lit(BUMP_START)) / T::lit(BUMP_END - BUMP_START)) * profile(c, s)
        }));
    }
    // sequential sum matches the cumulative table exactly
    (v.into_iter().fold(T::zero(), |a, b| a + b), dv.into_iter().fold(T::zero(), |a, b| a + b))
}

fn calibrate<T: Real>(resolution: usize, width: T, tol: T) -> Result<T> {
    let target = T::lit(0.25);
    let (mut lo, mut hi) = (T::zero(), T::one());
    if integral(resolution, width, lo).0 <= target {
        return Err(Error::Calibration("profile integral already below 1/4 without a dip".into()));
    }
    while integral(resolution, width, hi).0 > target {
        hi = hi * T::lit(2.0);
        if hi > T::lit(1e3) {
            return Err(Error::Calibration("no dip depth reaches the integral constraint".into()));
        }
    }
    let mut c = (lo + hi) * T::lit(0.5);
    for _ in 0..200 {
        let (f, df) = integral(resolution, width, c);
        let f = f - target;
        if f.abs() <= tol {
            return Ok(c);
        }
        if f > T::zero() {
            lo = c;
        } else {
            hi = c;
        }
        let mut next = c - f / df;
        if !(next > lo && next < hi) {
            next = (lo + hi) * T::lit(0.5);
        }
        if next == c {
            break;
        }
        c = next;
    }
    let f = integral(resolution, width, c).0 - target;
    if f.abs() <= tol {
        Ok(c)
    } else {
        Err(Error::Calibration(format!("integral constraint missed by {f}")))
    }
}

/// Outcome of the ψ invariant suite on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiInvariants {
    pub grid: usize,
    /// `max |ψ(t+1) − ψ(t) − 2|` over `t` in `[-2, 2]`
    pub periodicity_defect: f64,
    pub min_deriv: f64,
    pub max_deriv: f64,
    /// `max |ψ' − 3|` on `[1/4, 3/4]`
    pub plateau_defect: f64,
    pub psi_zero: f64,
    pub psi_quarter_error: f64,
    pub deriv_zero: f64,
    /// `max |ψ'(t) − 1| / t^5` over `0 < t <= 1e-2`
    pub flatness_constant: f64,
    /// `min` of consecutive differences of ψ on `[0, 1]`
    pub min_increment: f64,
}

impl PsiInvariants {
    pub fn passes(&self) -> bool {
        self.periodicity_defect < 1e-9
            && self.min_deriv > 0.0
            && self.max_deriv <= 3.0
            && self.plateau_defect < 1e-12
            && self.psi_zero == 0.0
            && self.psi_quarter_error < 1e-9
            && (self.deriv_zero - 1.0).abs() < 1e-12
            && self.flatness_constant <= 1.0
            && self.min_increment > 0.0
    }
}

pub fn invariant_suite<T: Real>(psi: &PsiModel<T>, grid: usize) -> PsiInvariants {
    let g = |i: usize| T::from_usize_lossy(i) / T::from_usize_lossy(grid);
    let mut out = PsiInvariants {
        grid,
        periodicity_defect: 0.0,
        min_deriv: f64::INFINITY,
        max_deriv: 0.0,
        plateau_defect: 0.0,
        psi_zero: psi.eval(T::zero()).as_f64(),
        psi_quarter_error: (psi.eval(T::lit(0.25)) - T::lit(0.25)).abs().as_f64(),
        deriv_zero: psi.deriv(T::zero()).as_f64(),
        flatness_constant: 0.0,
        min_increment: f64::INFINITY,
    };
    let mut prev = psi.eval(T::zero());
    for i in 0..=grid {
        let t = g(i);
        for shift in [-2.0, -1.0, 0.0, 1.0] {
            let u = t + T::lit(shift);
            let d = (psi.eval(u + T::one()) - psi.eval(u) - T::lit(2.0)).abs().as_f64();
            out.periodicity_defect = out.periodicity_defect.max(d);
        }
        let d = psi.deriv(t).as_f64();
        out.min_deriv = out.min_deriv.min(d);
        out.max_deriv = out.max_deriv.max(d);
        if (0.25..=0.75).contains(&t.as_f64()) {
            out.plateau_defect = out.plateau_defect.max((d - 3.0).abs());
        }
        if i > 0 {
            let v = psi.eval(t);
            out.min_increment = out.min_increment.min((v - prev).as_f64());
            prev = v;
        }
        let small = t.as_f64() * 1e-2;
        if small > 0.0 {
            let k = (psi.deriv(T::lit(small)).as_f64() - 1.0).abs() / small.powi(5);
            out.flatness_constant = out.flatness_constant.max(k);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::sync::LazyLock;

    static PSI: LazyLock<PsiModel<f64>> = LazyLock::new(|| PsiModel::build(1 << 12, 1e-14).unwrap());

    #[test]
    fn values() {
        let p = &*PSI;
        assert_eq!(p.eval(0.0), 0.0);
        assert!((p.eval(1.0) - 2.0).abs() < 1e-15);
        assert!((p.eval(0.75) - 1.75).abs() < 1e-12);
        assert!((p.eval(0.25) - 0.25).abs() < 1e-14);
        assert_eq!(p.deriv(0.0), 1.0);
        assert!(p.calibration_constant() > 0.0);
    }

    #[test]
    fn inverse_values() {
        let p = &*PSI;
        assert_eq!(p.iter(0, 0.3), 0.3);
        assert!((p.iter(-1, 1.0) - 0.5).abs() < 1e-15);
        assert!((p.iter(-1, 0.75) - 5.0 / 12.0).abs() < 1e-15);
        assert!((p.iter(-1, 0.5) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn odd_and_fixed_points() {
        let p = &*PSI;
        for t in [0.01, 0.1, 0.2, 0.3, 0.9, 1.7] {
            assert!((p.eval(-t) + p.eval(t)).abs() < 1e-14);
        }
        assert!((p.eval(-0.25) + 0.25).abs() < 1e-14);
        // ψ is the identity on [0, 1/40], where the bump has not started
        assert_eq!(p.eval(0.02), 0.02);
        for t in [0.04, 0.08, 0.15, 0.22] {
            assert!(p.eval(t) < t, "t={t}");
        }
    }

    #[test]
    fn identity_near_integers() {
        let p = &*PSI;
        for t in [0.001, 0.02, -0.02] {
            assert!((p.eval(t) - t).abs() < 1e-15);
            assert!((p.eval(1.0 + t) - 2.0 - t).abs() < 1e-14);
        }
    }

    #[test]
    fn suite_passes_at_2_12() {
        let inv = invariant_suite(&*PSI, 1 << 12);
        assert!(inv.passes(), "{inv:?}");
    }

    #[test]
    fn roundtrip_iterates() {
        let p = &*PSI;
        for j in -8..=8 {
            for i in 0..=64 {
                let t = 4.0 * i as f64 / 64.0;
                let back = p.iter(-j, p.iter(j, t));
                assert!((back - t).abs() < 1e-9, "j={j} t={t}");
            }
        }
    }

    #[test]
    fn iter_derivative_matches_difference() {
        let p = &*PSI;
        for j in [-3, -1, 1, 2] {
            for t in [0.1, 0.4, 0.7, 0.95] {
                let (_, d) = p.iter_with_deriv(j, t);
                let h = 1e-6;
                let fd = (p.iter(j, t + h) - p.iter(j, t - h)) / (2.0 * h);
                assert!((d - fd).abs() < 1e-6 * d.abs().max(1.0), "j={j} t={t}");
            }
        }
    }

    #[test]
    fn f32_model_builds() {
        let p = PsiModel::<f32>::build(1 << 10, 1e-6).unwrap();
        assert!((p.eval(0.25) - 0.25).abs() < 1e-5);
        assert!((p.iter(-1, 1.0) - 0.5).abs() < 1e-5);
    }

    #[test]
    fn low_resolution_rejected() {
        assert!(matches!(PsiModel::<f64>::build(100, 1e-12), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn profile_pieces() {
        assert_eq!(flat_step(-0.1f64), 0.0);
        assert_eq!(flat_step(1.2f64), 1.0);
        assert!((flat_step(0.5f64) - 0.5).abs() < 1e-15);
        assert_eq!(flat_bump(0.0f64), 0.0);
        assert!((flat_bump(0.5f64) - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn inverse_is_inverse(t in -3.0f64..3.0) {
            let p = &*PSI;
            prop_assert!((p.inverse(p.eval(t)) - t).abs() < 1e-12);
            prop_assert!((p.eval(p.inverse(t)) - t).abs() < 1e-12);
        }

        #[test]
        fn monotone(a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let p = &*PSI;
            if a < b {
                prop_assert!(p.eval(a) <= p.eval(b));
            }
        }
    }
}
