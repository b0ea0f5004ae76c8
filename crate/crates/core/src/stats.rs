//! Sample mean and standard error, summed pairwise for order-stable rounding.

use crate::scalar::{pairwise_sum, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl Estimate {
    pub fn from_samples<T: Real>(xs: &[T]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Estimate { mean: f64::NAN, se: f64::NAN, n };
        }
        let v: Vec<f64> = xs.iter().map(|x| x.as_f64()).collect();
        let mean = pairwise_sum(&v) / n as f64;
        if n == 1 {
            return Estimate { mean, se: f64::NAN, n };
        }
        let sq: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = pairwise_sum(&sq) / (n - 1) as f64;
        Estimate { mean, se: (var / n as f64).sqrt(), n }
    }

    /// Estimate of `E[a - b]` from paired samples.
    pub fn paired_difference(a: &[f64], b: &[f64]) -> Self {
        assert_eq!(a.len(), b.len());
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        Self::from_samples(&d)
    }

    /// Difference of two independent estimates.
    pub fn minus_independent(&self, other: &Estimate) -> Estimate {
        Estimate {
            mean: self.mean - other.mean,
            se: self.se.hypot(other.se),
            n: self.n.min(other.n),
        }
    }

    /// `|mean| <= z * se + allowance`.
    pub fn within(&self, z: f64, allowance: f64) -> bool {
        self.mean.abs() <= z * self.se + allowance
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_se() {
        let e = Estimate::from_samples(&[1.0f64, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        let var: f64 = 5.0 / 3.0;
        assert!((e.se - (var / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn paired() {
        let e = Estimate::paired_difference(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]);
        assert_eq!(e.mean, 0.0);
        assert_eq!(e.se, 0.0);
        assert!(e.within(4.0, 0.0));
    }

    #[test]
    fn degenerate() {
        assert!(Estimate::from_samples::<f64>(&[]).mean.is_nan());
        assert!(Estimate::from_samples(&[1.0f32]).se.is_nan());
    }
}
