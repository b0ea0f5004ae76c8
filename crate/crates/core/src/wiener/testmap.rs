//! Closed-form smooth test maps of `[0, 1]` and their Schwarzian derivatives.

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SmoothTestMap<T> {
    Identity,
    /// `(e^{at} − 1) / (e^a − 1)`, `a != 0`
    Exp { a: T },
    /// `t + c t²(1 − t)²`, `|c| <= 1/2`; derivative 1 at both endpoints
    Poly { c: T },
    /// `t / (c + (1 − c) t)`, `c > 0`; Schwarzian zero
    Mobius { c: T },
}

impl<T: Real> SmoothTestMap<T> {
    pub fn name(&self) -> String {
        match self {
            SmoothTestMap::Identity => "identity".into(),
            SmoothTestMap::Exp { a } => format!("exp(a={a})"),
            SmoothTestMap::Poly { c } => format!("poly(c={c})"),
            SmoothTestMap::Mobius { c } => format!("mobius(c={c})"),
        }
    }

    /// `[g, g', g'', g''']` at `t`.
    pub fn jet(&self, t: T) -> [T; 4] {
        let (one, two) = (T::one(), T::lit(2.0));
        match *self {
            SmoothTestMap::Identity => [t, one, T::zero(), T::zero()],
            SmoothTestMap::Exp { a } => {
                let den = a.exp_m1();
                let e = (a * t).exp();
                [(a * t).exp_m1() / den, a * e / den, a * a * e / den, a * a * a * e / den]
            }
            SmoothTestMap::Poly { c } => {
                let s = one - t;
                let g = t + c * t * t * s * s;
                // t²(1−t)² = t² − 2t³ + t⁴
                let d1 = one + c * (two * t - T::lit(6.0) * t * t + T::lit(4.0) * t * t * t);
                let d2 = c * (two - T::lit(12.0) * t + T::lit(12.0) * t * t);
                let d3 = c * (T::lit(-12.0) + T::lit(24.0) * t);
                [g, d1, d2, d3]
            }
            SmoothTestMap::Mobius { c } => {
                let b = one - c;
                let den = c + b * t;
                [
                    t / den,
                    c / (den * den),
                    -two * b * c / (den * den * den),
                    T::lit(6.0) * b * b * c / (den * den * den * den),
                ]
            }
        }
    }

    pub fn eval(&self, t: T) -> T {
        self.jet(t)[0]
    }

    pub fn deriv(&self, t: T) -> T {
        self.jet(t)[1]
    }

    /// `g'' / g'`
    pub fn log_deriv(&self, t: T) -> T {
        match *self {
            SmoothTestMap::Identity => T::zero(),
            SmoothTestMap::Exp { a } => a,
            _ => {
                let j = self.jet(t);
                j[2] / j[1]
            }
        }
    }

    /// `S_g = g'''/g' − (3/2)(g''/g')²`
    pub fn schwarzian(&self, t: T) -> T {
        match *self {
            SmoothTestMap::Identity | SmoothTestMap::Mobius { .. } => T::zero(),
            SmoothTestMap::Exp { a } => -a * a / T::lit(2.0),
            SmoothTestMap::Poly { .. } => self.schwarzian_from_jet(t),
        }
    }

    /// `S_g` evaluated from the derivative jet, without family shortcuts.
    pub fn schwarzian_from_jet(&self, t: T) -> T {
        let j = self.jet(t);
        let a = j[2] / j[1];
        j[3] / j[1] - T::lit(1.5) * a * a
    }

    /// `g⁻¹(y)` for `y` in `[0, 1]`.
    pub fn inverse(&self, y: T) -> T {
        match *self {
            SmoothTestMap::Identity => y,
            SmoothTestMap::Exp { a } => (y * a.exp_m1()).ln_1p() / a,
            SmoothTestMap::Mobius { c } => c * y / (T::one() - (T::one() - c) * y),
            SmoothTestMap::Poly { .. } => self.newton_inverse(y),
        }
    }

    /// `g⁻¹` over increasing `ys`, warm-starting each solve from its predecessor.
    pub fn inverse_increasing(&self, ys: &[T]) -> Vec<T> {
        let SmoothTestMap::Poly { c } = *self else {
            return ys.iter().map(|&y| self.inverse(y)).collect();
        };
        let one = T::one();
        let two = T::lit(2.0);
        // quadratic convergence with |g''/2g'| < 1: a step below √ε leaves an error below ε
        let tol = T::lit(0.1) * T::epsilon().sqrt();
        let mut out = Vec::with_capacity(ys.len());
        let mut t = T::zero();
        for &y in ys {
            // g' >= 1 − |c|/(6√3) > 0.9, so plain Newton converges from the previous root
            for _ in 0..16 {
                let u = t * (one - t);
                let step = (t + c * u * u - y) / (one + two * c * u * (one - two * t));
                t = t - step;
                if step.abs() <= tol {
                    break;
                }
            }
            t = t.max(T::zero()).min(one);
            out.push(t);
        }
        out
    }

    /// Safeguarded Newton on `[0, 1]`.
    fn newton_inverse(&self, y: T) -> T {
        let (mut lo, mut hi) = (T::zero(), T::one());
        let mut t = y;
        for _ in 0..100 {
            let [g, d, _, _] = self.jet(t);
            let f = g - y;
            if f == T::zero() {
                return t;
            }
            if f > T::zero() {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = t - f / d;
            if !(next > lo && next < hi) {
                next = (lo + hi) * T::lit(0.5);
            }
            if (next - t).abs() <= T::epsilon() {
                return next;
            }
            t = next;
        }
        t
    }

    /// `1 + max_t (|g''/g'| + (g''/g')² + |g'''/g'|)` on `grid + 1` points.
    pub fn c_g(&self, grid: usize) -> T {
        let mut best = T::zero();
        for i in 0..=grid {
            let t = T::from_usize_lossy(i) / T::from_usize_lossy(grid);
            let j = self.jet(t);
            let a = j[2] / j[1];
            best = best.max(a.abs() + a * a + (j[3] / j[1]).abs());
        }
        T::one() + best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn maps() -> Vec<SmoothTestMap<f64>> {
        vec![
            SmoothTestMap::Identity,
            SmoothTestMap::Exp { a: 0.5 },
            SmoothTestMap::Exp { a: -1.5 },
            SmoothTestMap::Poly { c: 0.5 },
            SmoothTestMap::Poly { c: -0.5 },
            SmoothTestMap::Mobius { c: 2.0 },
        ]
    }

    #[test]
    fn endpoints_and_monotone() {
        for g in maps() {
            assert!(g.eval(0.0).abs() < 1e-15, "{}", g.name());
            assert!((g.eval(1.0) - 1.0).abs() < 1e-15, "{}", g.name());
            for i in 0..=100 {
                assert!(g.deriv(i as f64 / 100.0) > 0.0);
            }
        }
        let p = SmoothTestMap::Poly { c: 0.5 };
        assert_eq!(p.deriv(0.0), 1.0);
        assert_eq!(p.deriv(1.0), 1.0);
    }

    #[test]
    fn jet_matches_differences() {
        for g in maps() {
            for t in [0.2, 0.5, 0.8] {
                let h = 1e-5;
                let j = g.jet(t);
                for k in 0..3 {
                    let fd = (g.jet(t + h)[k] - g.jet(t - h)[k]) / (2.0 * h);
                    assert!((fd - j[k + 1]).abs() < 1e-6 * (1.0 + j[k + 1].abs()), "{} k={k}", g.name());
                }
            }
        }
    }

    #[test]
    fn schwarzian_examples() {
        assert_eq!(SmoothTestMap::<f64>::Identity.schwarzian(0.3), 0.0);
        for a in [0.5f64, 1.5] {
            for t in [0.0, 0.4, 1.0] {
                let s = SmoothTestMap::Exp { a }.schwarzian(t);
                assert!((s + a * a / 2.0).abs() < 1e-12);
            }
        }
        for t in [0.0, 0.3, 0.9] {
            assert!(SmoothTestMap::Mobius { c: 3.0f64 }.schwarzian_from_jet(t).abs() < 1e-12);
            for a in [0.5f64, -2.0] {
                let g = SmoothTestMap::Exp { a };
                assert!((g.schwarzian_from_jet(t) - g.schwarzian(t)).abs() < 1e-12);
                assert!((g.log_deriv(t) - g.jet(t)[2] / g.jet(t)[1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn inverses() {
        for g in maps() {
            for i in 0..=20 {
                let y = i as f64 / 20.0;
                assert!((g.eval(g.inverse(y)) - y).abs() < 1e-14, "{}", g.name());
            }
        }
    }

    #[test]
    fn warm_started_inverse_matches() {
        let g = SmoothTestMap::Poly { c: -0.5f64 };
        let ys: Vec<f64> = (0..=1000).map(|i| g.eval(i as f64 / 1000.0)).collect();
        for (i, t) in g.inverse_increasing(&ys).iter().enumerate() {
            assert!((t - i as f64 / 1000.0).abs() < 1e-15);
            assert!((t - g.inverse(ys[i])).abs() < 1e-15);
        }
    }

    #[test]
    fn c_g_values() {
        assert_eq!(SmoothTestMap::<f64>::Identity.c_g(100), 1.0);
        let a = 0.5f64;
        assert!((SmoothTestMap::Exp { a }.c_g(100) - (1.0 + a + 2.0 * a * a)).abs() < 1e-12);
    }
}
