use std::fmt;

use super::{Dyadic, PlMap};
use crate::error::{invalid, Result};

/// Interior points `0 < x_1 < ... < x_{N-1} < 1` of a partition; the endpoints
/// 0 and 1 are implicit.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct DyadicTuple {
    coords: Vec<Dyadic>,
}

impl DyadicTuple {
    pub fn new(coords: Vec<Dyadic>) -> Result<Self> {
        if let Some(c) = coords.iter().find(|c| c.is_negative() || c.is_zero() || **c >= Dyadic::one()) {
            return Err(invalid(format!("coordinate {c} is not inside (0, 1)")));
        }
        if coords.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("tuple coordinates must be strictly increasing"));
        }
        Ok(Self { coords })
    }

    /// Caller guarantees the invariants (images of valid tuples under F).
    pub(crate) fn from_sorted_unchecked(coords: Vec<Dyadic>) -> Self {
        debug_assert!(coords.windows(2).all(|w| w[0] < w[1]));
        Self { coords }
    }

    pub fn coords(&self) -> &[Dyadic] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn map(&self, g: &PlMap) -> DyadicTuple {
        Self::from_sorted_unchecked(self.coords.iter().map(|x| g.eval(x)).collect())
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.coords.binary_search(x).is_ok()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(Dyadic::to_f64).collect()
    }
}

/// `[c1, c2, ...]` with each coordinate in `num/2^exp` form.
impl fmt::Display for DyadicTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let d = |s: &str| s.parse::<Dyadic>().unwrap();
        assert!(DyadicTuple::new(vec![d("1/2"), d("1/4")]).is_err());
        assert!(DyadicTuple::new(vec![d("0"), d("1/4")]).is_err());
        assert!(DyadicTuple::new(vec![d("1/4"), d("1")]).is_err());
        assert!(DyadicTuple::new(vec![d("1/4"), d("1/4")]).is_err());
        let t = DyadicTuple::new(vec![d("1/4"), d("3/8")]).unwrap();
        assert_eq!(t.to_string(), "[1/2^2, 3/2^3]");
        assert!(t.contains(&d("3/8")));
    }
}
