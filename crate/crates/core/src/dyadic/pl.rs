use std::fmt;

use super::Dyadic;
use crate::error::{invalid, Result};

/// Piecewise-linear homeomorphism of `[0, 1]` with dyadic breakpoints and
/// power-of-two slopes: an element of Thompson's group F.
///
/// Breakpoints are stored without redundant collinear points, so two maps are
/// equal exactly when their breakpoint lists are.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PlMap {
    points: Vec<(Dyadic, Dyadic)>,
    /// `log2` of the slope of each segment.
    slopes: Vec<i64>,
}

fn slope_log2(a: &(Dyadic, Dyadic), b: &(Dyadic, Dyadic)) -> Option<i64> {
    let dx = &b.0 - &a.0;
    let dy = &b.1 - &a.1;
    if dx.is_negative() || dx.is_zero() || dy.is_negative() || dy.is_zero() {
        return None;
    }
    (dx.numerator() == dy.numerator()).then(|| dx.exponent() as i64 - dy.exponent() as i64)
}

impl PlMap {
    /// Build from `(x, y)` breakpoints; the list must run from `(0,0)` to `(1,1)`
    /// with both coordinates strictly increasing and power-of-two slopes.
    pub fn from_breakpoints(points: Vec<(Dyadic, Dyadic)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("a PL map needs at least two breakpoints"));
        }
        let (first, last) = (&points[0], &points[points.len() - 1]);
        if !first.0.is_zero() || !first.1.is_zero() {
            return Err(invalid("first breakpoint must be (0, 0)"));
        }
        if last.0 != Dyadic::one() || last.1 != Dyadic::one() {
            return Err(invalid("last breakpoint must be (1, 1)"));
        }
        let mut slopes = Vec::with_capacity(points.len() - 1);
        for w in points.windows(2) {
            let s = slope_log2(&w[0], &w[1]).ok_or_else(|| {
                invalid(format!(
                    "segment ({}, {}) -> ({}, {}) is not increasing with power-of-two slope",
                    w[0].0, w[0].1, w[1].0, w[1].1
                ))
            })?;
            slopes.push(s);
        }
        Ok(Self::canonical(points, slopes))
    }

    fn canonical(points: Vec<(Dyadic, Dyadic)>, slopes: Vec<i64>) -> Self {
        let mut p = Vec::with_capacity(points.len());
        let mut s: Vec<i64> = Vec::with_capacity(slopes.len());
        let n = points.len();
        for (i, pt) in points.into_iter().enumerate() {
            if i > 0 && i < n - 1 && slopes[i - 1] == slopes[i] {
                continue;
            }
            if i > 0 {
                s.push(slopes[i - 1]);
            }
            p.push(pt);
        }
        Self { points: p, slopes: s }
    }

    pub fn identity() -> Self {
        Self { points: vec![(Dyadic::zero(), Dyadic::zero()), (Dyadic::one(), Dyadic::one())], slopes: vec![0] }
    }

    pub fn is_identity(&self) -> bool {
        self.points.len() == 2
    }

    pub fn breakpoints(&self) -> &[(Dyadic, Dyadic)] {
        &self.points
    }

    /// Interior breakpoints of the domain.
    pub fn domain_breaks(&self) -> impl Iterator<Item = &Dyadic> {
        self.points[1..self.points.len() - 1].iter().map(|p| &p.0)
    }

    pub fn slopes_log2(&self) -> &[i64] {
        &self.slopes
    }

    fn segment_of(&self, x: &Dyadic, by_y: bool) -> usize {
        // index of the first breakpoint strictly greater than x, minus one
        let i = self.points.partition_point(|p| if by_y { &p.1 <= x } else { &p.0 <= x });
        i.saturating_sub(1).min(self.points.len() - 2)
    }

    /// Exact image of `x` in `[0, 1]`.
    pub fn eval(&self, x: &Dyadic) -> Dyadic {
        debug_assert!(!x.is_negative() && *x <= Dyadic::one(), "argument outside [0, 1]");
        let i = self.segment_of(x, false);
        let (x0, y0) = &self.points[i];
        y0 + &(x - x0).scale_pow2(self.slopes[i])
    }

    /// Exact preimage of `y` in `[0, 1]`.
    pub fn eval_inverse(&self, y: &Dyadic) -> Dyadic {
        let i = self.segment_of(y, true);
        let (x0, y0) = &self.points[i];
        x0 + &(y - y0).scale_pow2(-self.slopes[i])
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PlMap) -> PlMap {
        let mut xs: Vec<Dyadic> = other.points.iter().map(|p| p.0.clone()).collect();
        xs.extend(self.points.iter().map(|p| other.eval_inverse(&p.0)));
        xs.sort();
        xs.dedup();
        let points: Vec<(Dyadic, Dyadic)> = xs
            .into_iter()
            .map(|x| {
                let y = self.eval(&other.eval(&x));
                (x, y)
            })
            .collect();
        let slopes = points
            .windows(2)
            .map(|w| slope_log2(&w[0], &w[1]).expect("composition stays in F"))
            .collect();
        Self::canonical(points, slopes)
    }

    pub fn inverse(&self) -> PlMap {
        PlMap {
            points: self.points.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
            slopes: self.slopes.iter().map(|s| -s).collect(),
        }
    }

    /// Integer power, negative exponents meaning powers of the inverse.
    pub fn pow(&self, n: i64) -> PlMap {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = PlMap::identity();
        for _ in 0..n.unsigned_abs() {
            acc = base.compose(&acc);
        }
        acc
    }
}

impl fmt::Display for PlMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.points.iter().map(|(x, y)| format!("({x}, {y})")).collect();
        write!(f, "PL[{}]", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Generator;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn generator_values() {
        let f1 = Generator::F1.map();
        let f2 = Generator::F2.map();
        assert_eq!(f1.eval(&d("7/8")), d("3/4"));
        assert_eq!(f2.eval(&d("1/4")), d("1/4"));
        assert_eq!(f2.eval(&d("13/16")), d("11/16"));
        assert_eq!(f1.eval(&Dyadic::zero()), Dyadic::zero());
        assert_eq!(f1.eval(&Dyadic::one()), Dyadic::one());
    }

    #[test]
    fn compose_examples() {
        let f1 = Generator::F1.map();
        let f2 = Generator::F2.map();
        assert!(f1.compose(&f1.inverse()).is_identity());
        assert_eq!(f2.compose(f1).eval(&d("15/16")), d("3/4"));
        assert_eq!(&PlMap::identity().compose(f2), f2);
    }

    #[test]
    fn inverse_examples() {
        let f1 = Generator::F1.map();
        assert_eq!(PlMap::identity().inverse(), PlMap::identity());
        assert_eq!(f1.inverse().eval(&d("1/4")), d("1/2"));
        assert_eq!(f1.inverse().eval(&d("5/8")), d("13/16"));
        assert_eq!(f1.eval_inverse(&d("5/8")), d("13/16"));
    }

    #[test]
    fn rejects_bad_maps() {
        let bad = vec![(Dyadic::zero(), Dyadic::zero()), (d("1/2"), d("3/8")), (Dyadic::one(), Dyadic::one())];
        assert!(PlMap::from_breakpoints(bad).is_err());
        assert!(PlMap::from_breakpoints(vec![(Dyadic::zero(), Dyadic::zero())]).is_err());
        let nonmono = vec![(Dyadic::zero(), Dyadic::zero()), (d("1/2"), d("1/2")), (d("1/2"), d("1/2")), (Dyadic::one(), Dyadic::one())];
        assert!(PlMap::from_breakpoints(nonmono).is_err());
    }

    #[test]
    fn collinear_points_are_merged() {
        let m = PlMap::from_breakpoints(vec![
            (Dyadic::zero(), Dyadic::zero()),
            (d("1/4"), d("1/4")),
            (Dyadic::one(), Dyadic::one()),
        ])
        .unwrap();
        assert!(m.is_identity());
    }
}
