use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar used by every numerical module: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, for literals and tolerances.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Sum with pairwise reduction; result does not depend on thread scheduling.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Trapezoid rule on a uniform grid of `values.len() - 1` cells over `[0, 1]`.
pub fn trapezoid<T: Real>(values: &[T]) -> T {
    let m = values.len() - 1;
    let h = T::one() / T::from_usize_lossy(m);
    let two = T::lit(2.0);
    let inner = pairwise_sum(&values[1..m]);
    h * (inner + (values[0] + values[m]) / two)
}

/// Cumulative trapezoid integral, starting at zero.
pub fn cumulative_trapezoid<T: Real>(values: &[T]) -> Vec<T> {
    let m = values.len() - 1;
    let half_h = T::lit(0.5) / T::from_usize_lossy(m);
    let mut out = Vec::with_capacity(values.len());
    let mut acc = T::zero();
    out.push(acc);
    for w in values.windows(2) {
        acc = acc + half_h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}
