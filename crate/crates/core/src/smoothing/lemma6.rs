//! Conjugation exponents: `g(φ_r(±t)) = φ_{f(r)}(ψ^e(±t))` for `t` in `[0, 1/4]`,
//! with `e` in `{-1, 0, 1}` determined by the position of `r`.

use std::fmt;

use super::generators::{phi, SmoothGenerator, Which};
use crate::dyadic::{Dyadic, Generator};
use crate::error::{Error, Result};
use crate::report::{fmt_f64, Table};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// `φ_r(t)`, `t >= 0`
    Plus,
    /// `φ_r(-t)`
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PositionClass {
    Half,
    ThreeQuarters,
    /// `r = 7/8`; only `g2` treats it separately.
    SevenEighths,
    BelowHalf,
    HalfToThreeQuarters,
    /// `3/4 < r < 1` for `g1`
    AboveThreeQuarters,
    /// `3/4 < r < 7/8` for `g2`
    ThreeQuartersToSevenEighths,
    /// `7/8 < r < 1` for `g2`
    AboveSevenEighths,
}

impl fmt::Display for PositionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PositionClass::Half => "r=1/2",
            PositionClass::ThreeQuarters => "r=3/4",
            PositionClass::SevenEighths => "r=7/8",
            PositionClass::BelowHalf => "0<r<1/2",
            PositionClass::HalfToThreeQuarters => "1/2<r<3/4",
            PositionClass::AboveThreeQuarters => "3/4<r<1",
            PositionClass::ThreeQuartersToSevenEighths => "3/4<r<7/8",
            PositionClass::AboveSevenEighths => "7/8<r<1",
        };
        f.write_str(s)
    }
}

pub fn position_class(r: &Dyadic, which: Which) -> Result<PositionClass> {
    let (half, q3, q7) = (Dyadic::new(1, 1), Dyadic::new(3, 2), Dyadic::new(7, 3));
    if r.is_negative() || r.is_zero() || *r >= Dyadic::one() {
        return Err(Error::UnsupportedClass(format!("{r} is not inside (0, 1)")));
    }
    Ok(if *r < half {
        PositionClass::BelowHalf
    } else if *r == half {
        PositionClass::Half
    } else if *r < q3 {
        PositionClass::HalfToThreeQuarters
    } else if *r == q3 {
        PositionClass::ThreeQuarters
    } else {
        match which {
            Which::G1 => PositionClass::AboveThreeQuarters,
            Which::G2 if *r < q7 => PositionClass::ThreeQuartersToSevenEighths,
            Which::G2 if *r == q7 => PositionClass::SevenEighths,
            Which::G2 => PositionClass::AboveSevenEighths,
        }
    })
}

/// The exponent `α_1, α_2` (for `g1`) or `β_1, β_2` (for `g2`); index 1 is the
/// `+` side.
pub fn lemma6_exponent(r: &Dyadic, which: Which, side: Side) -> Result<i32> {
    use PositionClass::*;
    let class = position_class(r, which)?;
    Ok(match (which, class, side) {
        (Which::G1, Half, Side::Plus) => 1,
        (Which::G1, ThreeQuarters, Side::Minus) => -1,
        (Which::G2, Half, Side::Plus) => -1,
        (Which::G2, ThreeQuarters, Side::Plus) => 1,
        (Which::G2, SevenEighths, Side::Minus) => -1,
        _ => 0,
    })
}

pub fn f_of(which: Which, r: &Dyadic) -> Dyadic {
    match which {
        Which::G1 => Generator::F1.map().eval(r),
        Which::G2 => Generator::F2.map().eval(r),
    }
}

/// `sup_t |g(φ_r(±t)) − φ_{f(r)}(ψ^e(±t))|` over `grid + 1` points of `[0, 1/4]`.
pub fn lemma6_verify<T: Real>(g: &SmoothGenerator<T>, r: &Dyadic, side: Side, grid: usize) -> Result<f64> {
    let e = lemma6_exponent(r, g.which, side)?;
    let psi = g.psi();
    let fr = f_of(g.which, r);
    let sign = match side {
        Side::Plus => T::one(),
        Side::Minus => -T::one(),
    };
    let mut sup = 0.0f64;
    for i in 0..=grid {
        let t = sign * T::lit(0.25) * T::from_usize_lossy(i) / T::from_usize_lossy(grid);
        let lhs = g.eval(phi(psi, r, t)?);
        let rhs = phi(psi, &fr, psi.iter(e, t))?;
        sup = sup.max((lhs - rhs).abs().as_f64());
    }
    Ok(sup)
}

/// All dyadic `r = k / 2^p` in `(0, 1)` with `p <= max_p`, in increasing order.
pub fn dyadics_up_to(max_p: u32) -> Vec<Dyadic> {
    (1..(1i64 << max_p)).map(|k| Dyadic::new(k, max_p)).collect()
}

/// Rows of `lemma6_audit.csv`: one per `(r, generator)`.
pub fn lemma6_audit<T: Real>(gens: [&SmoothGenerator<T>; 2], max_p: u32, grid: usize) -> Result<Table> {
    let mut out = Table::new("lemma6_audit", &["r", "case", "exponents", "sup_error"]);
    for r in dyadics_up_to(max_p) {
        for g in gens {
            let class = position_class(&r, g.which)?;
            let a = lemma6_exponent(&r, g.which, Side::Plus)?;
            let b = lemma6_exponent(&r, g.which, Side::Minus)?;
            let err = lemma6_verify(g, &r, Side::Plus, grid)?.max(lemma6_verify(g, &r, Side::Minus, grid)?);
            out.push([
                format!("{}", r.to_ratio()),
                format!("{} {class}", g.which.name()),
                format!("{a},{b}"),
                fmt_f64(err),
            ]);
        }
    }
    Ok(out)
}
