//! The `a(n, k)` recurrence, its generating functions `u_k = p_{k-1} / p_k`, and
//! the orbit sets `I_n^k` the recurrence is meant to count.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::dyadic::{standard_point, ActionOrder, DyadicTuple, Generator};
use crate::error::{invalid, Error, Result};
use crate::report::{cell, fmt_f64, Table};

/// Exact table of `a(n, k)` for `0 <= n <= n_max`, `1 <= k <= k_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    /// `cols[k - 1][n]`
    cols: Vec<Vec<BigUint>>,
}

impl CountTable {
    pub fn n_max(&self) -> usize {
        self.cols[0].len() - 1
    }

    pub fn k_max(&self) -> usize {
        self.cols.len()
    }

    /// Panics outside the stored range.
    pub fn get(&self, n: usize, k: usize) -> &BigUint {
        assert!(k >= 1 && k <= self.k_max() && n <= self.n_max(), "a({n},{k}) not stored");
        &self.cols[k - 1][n]
    }

    pub fn column(&self, k: usize) -> &[BigUint] {
        &self.cols[k - 1]
    }
}

/// `a(0,k) = 1`, `a(n,1) = 1`, `a(n+1,k+1) = sum_{i=0}^{n} a(i,k+1) a(n-i,k)`.
pub fn a_table(n_max: usize, k_max: usize) -> Result<CountTable> {
    if n_max < 1 || k_max < 1 {
        return Err(invalid("a_table needs n_max >= 1 and k_max >= 1"));
    }
    let mut cols = vec![vec![BigUint::one(); n_max + 1]];
    for k in 1..k_max {
        let prev = &cols[k - 1];
        let mut col = Vec::with_capacity(n_max + 1);
        col.push(BigUint::one());
        for n in 0..n_max {
            let s = (0..=n).fold(BigUint::zero(), |acc, i| acc + &col[i] * &prev[n - i]);
            col.push(s);
        }
        cols.push(col);
    }
    Ok(CountTable { cols })
}

/// Dense integer polynomial, ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c.to_f64().unwrap())
    }

    pub fn derivative(&self) -> IntPolynomial {
        IntPolynomial::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect(),
        )
    }

    fn minus_t_times(&self, other: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len() + 1);
        IntPolynomial::new(
            (0..len)
                .map(|i| if i == 0 { self.coeff(0) } else { self.coeff(i) - other.coeff(i - 1) })
                .collect(),
        )
    }

    /// First `terms` coefficients of the power series `self / den`; `den(0)` must be ±1.
    pub fn series_div(&self, den: &IntPolynomial, terms: usize) -> Result<Vec<BigInt>> {
        let b0 = den.coeff(0);
        if b0.abs() != BigInt::one() {
            return Err(invalid("series division needs a unit constant term"));
        }
        let mut q: Vec<BigInt> = Vec::with_capacity(terms);
        for i in 0..terms {
            let mut s = self.coeff(i);
            for j in 1..=i.min(den.coeffs.len().saturating_sub(1)) {
                s -= &den.coeffs[j] * &q[i - j];
            }
            q.push(s * &b0);
        }
        Ok(q)
    }
}

impl std::fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            let sep = if first { "" } else { " " };
            let body = match (i, mag == BigInt::one()) {
                (0, _) => mag.to_string(),
                (1, true) => "t".into(),
                (1, false) => format!("{mag}t"),
                (_, true) => format!("t^{i}"),
                (_, false) => format!("{mag}t^{i}"),
            };
            if first {
                write!(f, "{sign}{body}")?;
            } else {
                write!(f, "{sep}{sign} {body}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// `p_0 = 1`, `p_1 = 1 - t`, `p_{k+1} = p_k - t p_{k-1}`.
pub fn p_poly(k: usize) -> IntPolynomial {
    let mut prev = IntPolynomial::from_i64(&[1]);
    let mut cur = IntPolynomial::from_i64(&[1, -1]);
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let next = cur.minus_t_times(&prev);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Coefficients `0..=n_max` of `p_{k-1} / p_k` by exact long division.
pub fn series_from_gf(k: usize, n_max: usize) -> Result<Vec<BigUint>> {
    if k < 1 {
        return Err(invalid("series_from_gf needs k >= 1"));
    }
    p_poly(k - 1)
        .series_div(&p_poly(k), n_max + 1)?
        .into_iter()
        .map(|c| c.to_biguint().ok_or_else(|| invalid("negative series coefficient")))
        .collect()
}

/// Max coefficient deviation between `p_k` and the float expansion of
/// `prod_{l=1}^{floor((k+1)/2)} (1 - 4 t cos^2(pi l / (k+2)))`.
pub fn roots_check(k: usize) -> f64 {
    let mut prod = vec![1.0f64];
    for l in 1..=k.div_ceil(2) {
        let c = (PI * l as f64 / (k + 2) as f64).cos();
        let root = 4.0 * c * c;
        let mut next = prod.clone();
        next.push(0.0);
        for (i, p) in prod.iter().enumerate() {
            next[i + 1] -= root * p;
        }
        prod = next;
    }
    let exact = p_poly(k);
    let len = prod.len().max(exact.coeffs().len());
    (0..len)
        .map(|i| (prod.get(i).copied().unwrap_or(0.0) - exact.coeff(i).to_f64().unwrap()).abs())
        .fold(0.0, f64::max)
}

/// Dominant growth rate `4 cos^2(pi / (k+2))`.
pub fn predicted_growth(k: usize) -> f64 {
    let c = (PI / (k + 2) as f64).cos();
    4.0 * c * c
}

/// Smallest root `t1 = 1 / (4 cos^2(pi/(k+2)))` of `p_k`, Newton-polished on the
/// integer coefficients so rational roots (`k = 1, 2, 4`) come out exact.
pub fn dominant_root(k: usize) -> f64 {
    let (p, dp) = (p_poly(k), p_poly(k).derivative());
    let mut t = 1.0 / predicted_growth(k);
    let mut residual = p.eval_f64(t).abs();
    for _ in 0..4 {
        let next = t - p.eval_f64(t) / dp.eval_f64(t);
        let r = p.eval_f64(next).abs();
        // rounding noise in `p` must not walk the root away
        if !(r < residual) {
            break;
        }
        (t, residual) = (next, r);
    }
    t
}

/// `(a(n+1,k) / a(n,k), 4 cos^2(pi/(k+2)))`.
pub fn growth_rate(table: &CountTable, k: usize, n: usize) -> (f64, f64) {
    let r = BigRational::new(table.get(n + 1, k).clone().into(), table.get(n, k).clone().into());
    (r.to_f64().unwrap(), predicted_growth(k))
}

/// Natural log of a positive big integer, without overflowing `f64`.
fn ln_big(a: &BigUint) -> f64 {
    let bits = a.bits();
    if bits <= 1000 {
        return a.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (a >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantAudit {
    /// `a(n,k) / (4^{n+1} cos^{2n}(pi/(k+2)))`
    pub empirical_limit: f64,
    /// `(k+2) sin^2(pi/(k+2))`
    pub paper_claim: f64,
    pub ratio: f64,
    /// Limit predicted by the dominant pole of `p_{k-1}/p_k`.
    pub residue_limit: f64,
}

/// With `t1` the smallest root of `p_k`, `a(n,k) ~ A t1^{-n}` where
/// `A = -p_{k-1}(t1) / (t1 p_k'(t1))`; since `t1^{-1} = 4 cos^2(pi/(k+2))` the
/// normalised quantity tends to `A / 4`.
pub fn residue_limit(k: usize) -> f64 {
    let t1 = dominant_root(k);
    let a = -p_poly(k - 1).eval_f64(t1) / (t1 * p_poly(k).derivative().eval_f64(t1));
    a / 4.0
}

/// Trigonometric values go through `t1 = 1 / (4 cos^2)`, so `sin^2 = 1 - 1/(4 t1)`.
pub fn paper_constant_audit(table: &CountTable, k: usize, n: usize) -> ConstantAudit {
    let t1 = dominant_root(k);
    let empirical_limit = (ln_big(table.get(n, k)) + n as f64 * t1.ln() - 4f64.ln()).exp();
    let paper_claim = (k + 2) as f64 * (1.0 - 1.0 / (4.0 * t1));
    ConstantAudit {
        empirical_limit,
        paper_claim,
        ratio: paper_claim / empirical_limit,
        residue_limit: residue_limit(k),
    }
}

/// Images of `(r_0, ..., r_{n+1})` under `prod_{j=1}^{n} f2 f1^{l_{j-1} - l_j}`,
/// `l_0 = l_n = 0`, `0 <= l_i <= min(k, i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitSet {
    pub n: usize,
    pub k: usize,
    pub order: ActionOrder,
    pub tuples: BTreeSet<DyadicTuple>,
}

impl OrbitSet {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// Words enumerated by [`enumerate_ink`] with default limits (`n = 10, k = 4`).
pub const DEFAULT_WORD_BUDGET: u128 = 375_000;

/// Number of admissible exponent sequences `(l_1, ..., l_{n-1})`.
pub fn word_count(n: usize, k: usize) -> u128 {
    (1..n).map(|i| (k.min(i) + 1) as u128).product()
}

pub fn enumerate_ink(n: usize, k: usize, order: ActionOrder) -> Result<OrbitSet> {
    enumerate_ink_with_budget(n, k, order, DEFAULT_WORD_BUDGET)
}

pub fn enumerate_ink_with_budget(
    n: usize,
    k: usize,
    order: ActionOrder,
    budget: u128,
) -> Result<OrbitSet> {
    let needed = word_count(n, k);
    if needed > budget {
        return Err(Error::BudgetExceeded { what: format!("I_{n}^{k} words"), needed, budget });
    }
    let start = DyadicTuple::new((0..=n as i64 + 1).map(standard_point).collect())?;
    let tuples = if n == 0 {
        BTreeSet::from([start])
    } else {
        match order {
            ActionOrder::RightmostFirst => {
                // factor j is f2 f1^{l_{j-1}-l_j}; factors n, n-1, ..., 1 act in turn
                let choices = |j: usize| if j == 1 { 0 } else { k.min(j - 1) };
                (0..=choices(n))
                    .into_par_iter()
                    .map(|l| {
                        let mut out = BTreeSet::new();
                        let t = factor(&start, l as i64);
                        dfs_right(t, n - 1, l, k, &mut out);
                        out
                    })
                    .reduce(BTreeSet::new, union)
            }
            ActionOrder::LeftmostFirst => {
                // factors 1, 2, ..., n act in turn, each as f2 then f1^{l_{j-1}-l_j}
                let choices = if n == 1 { 0 } else { k.min(1) };
                (0..=choices)
                    .into_par_iter()
                    .map(|l1| {
                        let mut out = BTreeSet::new();
                        let t = factor_left(&start, -(l1 as i64));
                        dfs_left(t, 1, l1, n, k, &mut out);
                        out
                    })
                    .reduce(BTreeSet::new, union)
            }
        }
    };
    Ok(OrbitSet { n, k, order, tuples })
}

fn union(mut a: BTreeSet<DyadicTuple>, mut b: BTreeSet<DyadicTuple>) -> BTreeSet<DyadicTuple> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    a.extend(b);
    a
}

fn pow_f1(t: &DyadicTuple, e: i64) -> DyadicTuple {
    if e == 0 {
        return t.clone();
    }
    let m = if e > 0 { Generator::F1.map() } else { Generator::F1.inverse_map() };
    (0..e.unsigned_abs()).fold(t.clone(), |acc, _| acc.map(m))
}

/// `f2 f1^e` acting on `t`, `f1^e` first.
fn factor(t: &DyadicTuple, e: i64) -> DyadicTuple {
    pow_f1(t, e).map(Generator::F2.map())
}

/// `f1^e` after `f2`.
fn factor_left(t: &DyadicTuple, e: i64) -> DyadicTuple {
    pow_f1(&t.map(Generator::F2.map()), e)
}

/// Factors `j+1..=n` have acted; `l_j = lj`.
fn dfs_right(t: DyadicTuple, j: usize, lj: usize, k: usize, out: &mut BTreeSet<DyadicTuple>) {
    if j == 0 {
        out.insert(t);
        return;
    }
    let hi = if j == 1 { 0 } else { k.min(j - 1) };
    for l in 0..=hi {
        dfs_right(factor(&t, l as i64 - lj as i64), j - 1, l, k, out);
    }
}

/// Factors `1..=j` have acted; `l_j = lj`.
fn dfs_left(
    t: DyadicTuple,
    j: usize,
    lj: usize,
    n: usize,
    k: usize,
    out: &mut BTreeSet<DyadicTuple>,
) {
    if j == n {
        out.insert(t);
        return;
    }
    let hi = if j + 1 == n { 0 } else { k.min(j + 1) };
    for l in 0..=hi {
        dfs_left(factor_left(&t, lj as i64 - l as i64), j + 1, l, n, k, out);
    }
}

/// Rows of `counting_audit.csv` for `0 <= n <= n_max`, `1 <= k <= k_max`.
/// Orbit sizes are filled in where the enumeration fits `orbit_budget`.
pub fn counting_audit(n_max: usize, k_max: usize, orbit_budget: u128) -> Result<Table> {
    let table = a_table(n_max.max(1) + 1, k_max)?;
    let mut out = Table::new(
        "counting_audit",
        &[
            "n", "k", "a_recurrence", "a_series", "orbit_size", "empirical_limit", "paper_claim",
            "ratio",
        ],
    );
    for k in 1..=k_max {
        let series = series_from_gf(k, n_max)?;
        for (n, s) in series.iter().enumerate() {
            let orbit = if word_count(n, k) <= orbit_budget {
                cell(enumerate_ink(n, k, ActionOrder::RightmostFirst)?.len())
            } else {
                String::new()
            };
            let audit = paper_constant_audit(&table, k, n);
            out.push([
                cell(n),
                cell(k),
                cell(table.get(n, k)),
                cell(s),
                orbit,
                fmt_f64(audit.empirical_limit),
                fmt_f64(audit.paper_claim),
                fmt_f64(audit.ratio),
            ]);
        }
    }
    Ok(out)
}
