//! Exact dyadic arithmetic and Thompson's group F.
//!
//! Values are immutable; every operation allocates a fresh result, so all types
//! here are `Send + Sync` and free to share across threads.

mod pl;
mod rational;
mod tuple;
mod word;

pub use pl::PlMap;
pub use rational::Dyadic;
pub use tuple::DyadicTuple;
pub use word::{ActionOrder, Generator, GroupWord};

/// Standard orbit points, indexed so that `f1(r_n) = r_{n-1}` for every integer `n`:
/// `r_n = 1 - 2^-(n+1)` for `n >= 0` and `r_{-k} = 2^-(k+1)` for `k >= 1`.
pub fn standard_point(n: i64) -> Dyadic {
    if n >= 0 {
        Dyadic::one() - Dyadic::pow2(-(n + 1))
    } else {
        Dyadic::pow2(n - 1)
    }
}

/// The negative-index points exactly as the printed formula `r_{-k} = 2^-k` gives
/// them. This collides with `r_0 = 1/2` at `k = 1`, so `f1(r_0) = r_{-1}` fails
/// for this indexing; [`standard_point`] is the orbit-consistent one.
pub fn standard_point_literal(n: i64) -> Dyadic {
    if n >= 0 {
        standard_point(n)
    } else {
        Dyadic::pow2(n)
    }
}

/// Maximum gap of a partition given by its interior points, including 0 and 1.
pub fn mesh(tuple: &DyadicTuple) -> Dyadic {
    let mut prev = Dyadic::zero();
    let mut best = Dyadic::zero();
    for c in tuple.coords().iter().chain(std::iter::once(&Dyadic::one())) {
        let gap = c - &prev;
        if gap > best {
            best = gap;
        }
        prev = c.clone();
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn standard_points() {
        assert_eq!(standard_point(0), d("1/2"));
        assert_eq!(standard_point(2), d("7/8"));
        assert_eq!(standard_point(-1), d("1/4"));
        assert_eq!(standard_point(-2), d("1/8"));
        assert_eq!(standard_point_literal(-2), d("1/4"));
        assert_eq!(standard_point_literal(-1), d("1/2"));
    }

    #[test]
    fn f1_shifts_standard_points() {
        let f1 = Generator::F1.map();
        for n in -10..=10 {
            assert_eq!(f1.eval(&standard_point(n)), standard_point(n - 1), "n = {n}");
        }
    }

    #[test]
    fn literal_indexing_breaks_the_shift_only_at_zero() {
        let f1 = Generator::F1.map();
        let bad: Vec<i64> = (-10..=10)
            .filter(|&n| f1.eval(&standard_point_literal(n)) != standard_point_literal(n - 1))
            .collect();
        assert_eq!(bad, vec![0]);
    }

    #[test]
    fn mesh_examples() {
        let t = |v: &[&str]| DyadicTuple::new(v.iter().map(|s| d(s)).collect()).unwrap();
        assert_eq!(mesh(&t(&["1/4", "1/2", "3/4"])), d("1/4"));
        assert_eq!(mesh(&t(&["1/2"])), d("1/2"));
        assert_eq!(mesh(&t(&["1/8", "1/2"])), d("1/2"));
    }
}
