//! Charts `φ_r` and the generators `g1`, `g2` as piecewise compositions of ψ-iterates.

use std::sync::Arc;

use num_traits::ToPrimitive;

use super::psi::PsiModel;
use crate::dyadic::Dyadic;
use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Canonical `(k, p)` with `r = k / 2^p`, `k` odd, for `0 < r < 1`.
pub fn chart_index(r: &Dyadic) -> Result<(i64, u32)> {
    if r.is_negative() || r.is_zero() || *r >= Dyadic::one() {
        return Err(invalid(format!("chart point {r} is not inside (0, 1)")));
    }
    let (k, p) = r.odd_form().expect("non-integer");
    Ok((k.to_i64().ok_or_else(|| invalid("chart numerator too large"))?, p))
}

/// `φ_r(t) = ψ^{-p}(k + t)`.
pub fn phi<T: Real>(psi: &PsiModel<T>, r: &Dyadic, t: T) -> Result<T> {
    let (k, p) = chart_index(r)?;
    Ok(psi.iter(-(p as i32), T::lit(k as f64) + t))
}

/// `(φ_r(t), φ_r'(t))`.
pub fn phi_with_deriv<T: Real>(psi: &PsiModel<T>, r: &Dyadic, t: T) -> Result<(T, T)> {
    let (k, p) = chart_index(r)?;
    Ok(psi.iter_with_deriv(-(p as i32), T::lit(k as f64) + t))
}

/// `(x'_r, x_r, x''_r) = (φ_r(-1/4), φ_r(0), φ_r(1/4))`.
pub fn chart_points<T: Real>(psi: &PsiModel<T>, r: &Dyadic) -> Result<(T, T, T)> {
    let q = T::lit(0.25);
    Ok((phi(psi, r, -q)?, phi(psi, r, T::zero())?, phi(psi, r, q)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Which {
    G1,
    G2,
}

impl Which {
    pub fn name(self) -> &'static str {
        match self {
            Which::G1 => "g1",
            Which::G2 => "g2",
        }
    }
}

/// `t ↦ ψ^{-outer}(ψ^{inner}(t) + shift)` on `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece<T> {
    pub lo: T,
    pub hi: T,
    pub outer: i32,
    pub inner: i32,
    pub shift: T,
}

impl<T: Real> Piece<T> {
    /// The formula itself, valid on all of ℝ.
    pub fn eval(&self, psi: &PsiModel<T>, t: T) -> T {
        psi.iter(-self.outer, psi.iter(self.inner, t) + self.shift)
    }

    pub fn eval_with_deriv(&self, psi: &PsiModel<T>, t: T) -> (T, T) {
        let (u, du) = psi.iter_with_deriv(self.inner, t);
        let (v, dv) = psi.iter_with_deriv(-self.outer, u + self.shift);
        (v, dv * du)
    }

    fn inverted(&self, psi: &PsiModel<T>) -> Piece<T> {
        Piece {
            lo: self.eval(psi, self.lo),
            hi: self.eval(psi, self.hi),
            outer: self.inner,
            inner: self.outer,
            shift: -self.shift,
        }
    }
}

/// `g1`, `g2` or an inverse, as a list of pieces covering `[0, 1]`.
#[derive(Clone, Debug)]
pub struct SmoothGenerator<T: Real> {
    pub which: Which,
    pub inverse: bool,
    psi: Arc<PsiModel<T>>,
    pieces: Vec<Piece<T>>,
}

impl<T: Real> SmoothGenerator<T> {
    pub fn new(psi: Arc<PsiModel<T>>, which: Which) -> Self {
        let x34 = psi.iter(-2, T::lit(3.0));
        let half = T::lit(0.5);
        let (z, one) = (T::zero(), T::one());
        let p = |lo, hi, outer, inner, shift: f64| Piece { lo, hi, outer, inner, shift: T::lit(shift) };
        let pieces = match which {
            Which::G1 => vec![p(z, half, 1, 0, 0.0), p(half, x34, 2, 2, -1.0), p(x34, one, 0, 1, -1.0)],
            Which::G2 => {
                let x78 = psi.iter(-3, T::lit(7.0));
                vec![
                    p(z, half, 0, 0, 0.0),
                    p(half, x34, 2, 1, 1.0),
                    p(x34, x78, 3, 3, -1.0),
                    p(x78, one, 0, 1, -1.0),
                ]
            }
        };
        SmoothGenerator { which, inverse: false, psi, pieces }
    }

    pub fn inverted(&self) -> Self {
        let mut pieces: Vec<Piece<T>> = self.pieces.iter().map(|p| p.inverted(&self.psi)).collect();
        pieces[0].lo = T::zero();
        pieces.last_mut().unwrap().hi = T::one();
        SmoothGenerator { which: self.which, inverse: !self.inverse, psi: self.psi.clone(), pieces }
    }

    pub fn psi(&self) -> &PsiModel<T> {
        &self.psi
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    /// Interior piece boundaries.
    pub fn breakpoints(&self) -> Vec<T> {
        self.pieces[1..].iter().map(|p| p.lo).collect()
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.which.name(), if self.inverse { "^-1" } else { "" })
    }

    fn piece_at(&self, t: T) -> &Piece<T> {
        let i = self.pieces.partition_point(|p| p.hi < t).min(self.pieces.len() - 1);
        &self.pieces[i]
    }

    /// Input is clamped to `[0, 1]`.
    pub fn eval(&self, t: T) -> T {
        let t = t.max(T::zero()).min(T::one());
        self.piece_at(t).eval(&self.psi, t)
    }

    pub fn deriv(&self, t: T) -> T {
        let t = t.max(T::zero()).min(T::one());
        self.piece_at(t).eval_with_deriv(&self.psi, t).1
    }

    pub fn eval_with_deriv(&self, t: T) -> (T, T) {
        let t = t.max(T::zero()).min(T::one());
        self.piece_at(t).eval_with_deriv(&self.psi, t)
    }
}

/// Central-difference estimates of the first three derivatives of `f` at `t`;
/// `h` for orders 1 and 2, `h3` for order 3.
pub fn fd_derivatives<T: Real>(f: impl Fn(T) -> T, t: T, h: T, h3: T) -> [T; 3] {
    let two = T::lit(2.0);
    let d1 = (f(t + h) - f(t - h)) / (two * h);
    let d2 = (f(t + h) - two * f(t) + f(t - h)) / (h * h);
    let d3 = (f(t + two * h3) - two * f(t + h3) + two * f(t - h3) - f(t - two * h3)) / (two * h3 * h3 * h3);
    [d1, d2, d3]
}

/// `|left^(i) − right^(i)|` at `t` for `i = 1, 2, 3`.
pub fn derivative_jumps<T: Real>(
    left: impl Fn(T) -> T,
    right: impl Fn(T) -> T,
    t: T,
    h: T,
    h3: T,
) -> [f64; 3] {
    let a = fd_derivatives(left, t, h, h3);
    let b = fd_derivatives(right, t, h, h3);
    [0, 1, 2].map(|i| (a[i] - b[i]).abs().as_f64())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BreakpointJump {
    pub t: f64,
    /// value mismatch of the two piece formulas
    pub value: f64,
    pub jumps: [f64; 3],
}

/// Steps of the C³ check: first and second derivatives use `h`, the third `h3`.
pub const C3_STEP: f64 = 1e-4;
pub const C3_STEP_THIRD: f64 = 2e-4;

/// Compares derivatives of adjacent piece formulas at every interior breakpoint.
pub fn c3_breakpoint_check<T: Real>(g: &SmoothGenerator<T>, h: T, h3: T) -> Vec<BreakpointJump> {
    g.pieces
        .windows(2)
        .map(|w| {
            let t = w[1].lo;
            let left = |s| w[0].eval(&g.psi, s);
            let right = |s| w[1].eval(&g.psi, s);
            BreakpointJump {
                t: t.as_f64(),
                value: (left(t) - right(t)).abs().as_f64(),
                jumps: derivative_jumps(left, right, t, h, h3),
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Regularity {
    pub deriv_at_0: f64,
    pub deriv_at_1: f64,
    pub max_value_mismatch: f64,
    pub max_jumps: [f64; 3],
    pub strictly_increasing: bool,
}

impl Regularity {
    /// Endpoint derivatives 1 within 1e-6, C¹/C² jumps below 1e-5, C³ below 1e-3.
    pub fn passes(&self) -> bool {
        (self.deriv_at_0 - 1.0).abs() < 1e-6
            && (self.deriv_at_1 - 1.0).abs() < 1e-6
            && self.max_value_mismatch < 1e-9
            && self.max_jumps[0] < 1e-5
            && self.max_jumps[1] < 1e-5
            && self.max_jumps[2] < 1e-3
            && self.strictly_increasing
    }
}

pub fn regularity<T: Real>(g: &SmoothGenerator<T>, grid: usize) -> Regularity {
    let jumps = c3_breakpoint_check(g, T::lit(C3_STEP), T::lit(C3_STEP_THIRD));
    let mut max_jumps = [0.0f64; 3];
    let mut mismatch = 0.0f64;
    for j in &jumps {
        mismatch = mismatch.max(j.value);
        for i in 0..3 {
            max_jumps[i] = max_jumps[i].max(j.jumps[i]);
        }
    }
    let vals: Vec<T> = (0..=grid).map(|i| g.eval(T::from_usize_lossy(i) / T::from_usize_lossy(grid))).collect();
    Regularity {
        deriv_at_0: g.deriv(T::zero()).as_f64(),
        deriv_at_1: g.deriv(T::one()).as_f64(),
        max_value_mismatch: mismatch,
        max_jumps,
        strictly_increasing: vals.windows(2).all(|w| w[0] < w[1]),
    }
}
