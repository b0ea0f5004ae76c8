//! The gluing map `Q(x̄, φ₁…φₙ) = f ∘ l̃⁻¹`, its conjugation identity, the
//! averaging estimator `L` over a finite tuple support, and the Hölder gauge `p_δ`.
//!
//! With weights `w_1 = Δx_1`, `w_m = Δx_m Π_{j=2..m} φ_j'(0) / Π_{j=1..m-1} φ_j'(1)`
//! and `L_k = Σ_{m<=k} w_m / Σ w`, the composite is
//! `Q(s) = x_{k-1} + Δx_k φ_k((s − L_{k-1}) / (L_k − L_{k-1}))` on `[L_{k-1}, L_k]`.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::report::{cell, fmt_f64, Table};
use crate::scalar::Real;
use crate::smoothing::SmoothGenerator;
use crate::stats::Estimate;
use crate::wiener::{a_inv, brownian_from, path_rng, Functional, GridDiffeo, SmoothTestMap};

/// Increasing self-map of `[0, 1]` with a computable inverse.
pub trait Diffeo<T: Real>: Sync {
    fn eval_with_deriv(&self, t: T) -> (T, T);
    fn inverse(&self, y: T) -> T;
    fn label(&self) -> String;

    fn eval(&self, t: T) -> T {
        self.eval_with_deriv(t).0
    }
}

impl<T: Real> Diffeo<T> for SmoothTestMap<T> {
    fn eval_with_deriv(&self, t: T) -> (T, T) {
        let j = self.jet(t);
        (j[0], j[1])
    }
    fn inverse(&self, y: T) -> T {
        SmoothTestMap::inverse(self, y)
    }
    fn label(&self) -> String {
        self.name()
    }
}

/// A smooth generator bundled with its inverse.
#[derive(Clone, Debug)]
pub struct GeneratorPair<T: Real> {
    pub forward: SmoothGenerator<T>,
    pub backward: SmoothGenerator<T>,
}

impl<T: Real> GeneratorPair<T> {
    pub fn new(g: SmoothGenerator<T>) -> Self {
        GeneratorPair { backward: g.inverted(), forward: g }
    }
}

impl<T: Real> Diffeo<T> for GeneratorPair<T> {
    fn eval_with_deriv(&self, t: T) -> (T, T) {
        self.forward.eval_with_deriv(t)
    }
    fn inverse(&self, y: T) -> T {
        self.backward.eval(y)
    }
    fn label(&self) -> String {
        self.forward.name()
    }
}

/// Interior knots `0 < x_1 < … < x_{n-1} < 1` and one piece per gap.
#[derive(Clone, Debug, PartialEq)]
pub struct GlueInput<T> {
    knots: Vec<T>,
    pieces: Vec<GridDiffeo<T>>,
}

impl<T: Real> GlueInput<T> {
    pub fn new(interior: Vec<T>, pieces: Vec<GridDiffeo<T>>) -> Result<Self> {
        if pieces.len() != interior.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} pieces for {} gaps",
                pieces.len(),
                interior.len() + 1
            )));
        }
        let mut knots = Vec::with_capacity(interior.len() + 2);
        knots.push(T::zero());
        knots.extend(interior);
        knots.push(T::one());
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("knots must increase strictly inside (0, 1)".into()));
        }
        Ok(GlueInput { knots, pieces })
    }

    /// Identity pieces on grid `m`.
    pub fn identities(interior: Vec<T>, m: usize) -> Result<Self> {
        let n = interior.len() + 1;
        Self::new(interior, vec![GridDiffeo::identity(m); n])
    }

    pub fn gaps(&self) -> usize {
        self.pieces.len()
    }

    /// `0, x_1, …, x_{n-1}, 1`
    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn pieces(&self) -> &[GridDiffeo<T>] {
        &self.pieces
    }

    /// Unnormalized weights `w_m`.
    pub fn weights(&self) -> Vec<T> {
        let mut w = Vec::with_capacity(self.gaps());
        let mut ratio = T::one();
        for (m, p) in self.pieces.iter().enumerate() {
            if m > 0 {
                let prev = &self.pieces[m - 1];
                ratio = ratio * p.derivs()[0] / prev.derivs()[prev.grid()];
            }
            w.push((self.knots[m + 1] - self.knots[m]) * ratio);
        }
        w
    }

    /// `L_0 = 0, L_1, …, L_n = 1`
    pub fn time_knots(&self) -> Vec<T> {
        let w = self.weights();
        let total: T = w.iter().copied().fold(T::zero(), |a, b| a + b);
        let mut out = Vec::with_capacity(w.len() + 1);
        let mut acc = T::zero();
        out.push(acc);
        for &x in &w[..w.len() - 1] {
            acc = acc + x;
            out.push(acc / total);
        }
        out.push(T::one());
        out
    }

    fn block(&self, t: T) -> (usize, T) {
        let n = self.gaps();
        let x = t.max(T::zero()).min(T::one()) * T::from_usize_lossy(n);
        let k = x.floor().to_usize().unwrap_or(0).min(n - 1);
        (k, x - T::from_usize_lossy(k))
    }

    /// `f_n(t) = x_{k-1} + Δx_k φ_k(n t − (k − 1))`
    pub fn build_fn(&self, t: T) -> T {
        let (k, u) = self.block(t);
        self.knots[k] + (self.knots[k + 1] - self.knots[k]) * self.pieces[k].eval(u)
    }

    /// The piecewise linear time change `l̃_n`.
    pub fn build_ltilde(&self, t: T) -> T {
        let (k, u) = self.block(t);
        let l = self.time_knots();
        l[k] + (l[k + 1] - l[k]) * u
    }

    /// Time knots together with the slopes `W / w_k` of the inverse time change.
    /// The slope stays finite when a tiny weight rounds its time span to zero.
    fn time_map(&self) -> (Vec<T>, Vec<T>) {
        let w = self.weights();
        let total: T = w.iter().copied().fold(T::zero(), |a, b| a + b);
        (self.time_knots(), w.iter().map(|&x| total / x).collect())
    }

    /// `(Q(s), Q'(s))`, taking the piece that starts at a knot.
    fn eval_q(&self, (l, rate): &(Vec<T>, Vec<T>), s: T) -> (T, T) {
        let k = l[1..].partition_point(|&b| b <= s).min(self.gaps() - 1);
        let span = l[k + 1] - l[k];
        let u = if span > T::zero() { ((s - l[k]) / span).max(T::zero()).min(T::one()) } else { T::zero() };
        let dx = self.knots[k + 1] - self.knots[k];
        let (v, d) = self.pieces[k].eval_with_deriv(u);
        (self.knots[k] + dx * v, dx * d * rate[k])
    }

    /// `Q'` at relative position `u` of piece `k`.
    fn piece_slope(&self, rate: &[T], k: usize, u: T) -> T {
        (self.knots[k + 1] - self.knots[k]) * self.pieces[k].eval_with_deriv(u).1 * rate[k]
    }

    /// `Q` at `s`.
    pub fn q_eval(&self, s: T) -> T {
        self.eval_q(&self.time_map(), s).0
    }

    /// `Q` sampled on an output grid of `m` cells.
    pub fn q_glue(&self, m: usize) -> GridDiffeo<T> {
        let tm = self.time_map();
        let mf = T::from_usize_lossy(m);
        let (mut values, mut derivs): (Vec<T>, Vec<T>) =
            (0..=m).map(|i| self.eval_q(&tm, T::from_usize_lossy(i) / mf)).unzip();
        values[0] = T::zero();
        values[m] = T::one();
        derivs[m] = self.piece_slope(&tm.1, self.gaps() - 1, T::one());
        GridDiffeo::new(values, derivs).expect("glued map is a diffeomorphism")
    }

    /// One-sided derivatives `(Q'(L_k − 0), Q'(L_k + 0))` at the interior time knots.
    pub fn knot_derivatives(&self) -> Vec<(T, T)> {
        let (_, rate) = self.time_map();
        (1..self.gaps()).map(|k| (self.piece_slope(&rate, k - 1, T::one()), self.piece_slope(&rate, k, T::zero()))).collect()
    }

    /// Largest relative one-sided derivative mismatch over the interior knots.
    pub fn knot_mismatch(&self) -> T {
        self.knot_derivatives()
            .into_iter()
            .map(|(a, b)| (a - b).abs() / a.max(b))
            .fold(T::zero(), T::max)
    }
}

/// Pieces `φ_k(t) = (g(x_{k-1} + Δx_k q_k(t)) − g(x_{k-1})) / (g(x_k) − g(x_{k-1}))`
/// over the knots `g(x̄)`, so that `Q(g(x̄), φ) = g ∘ Q(x̄, q)`.
pub fn conjugation_pieces<T: Real, G: Diffeo<T> + ?Sized>(g: &G, input: &GlueInput<T>) -> GlueInput<T> {
    let x = input.knots();
    let y: Vec<T> = x.iter().map(|&t| g.eval(t)).collect();
    let pieces = input
        .pieces()
        .iter()
        .enumerate()
        .map(|(k, q)| {
            let (dx, dy) = (x[k + 1] - x[k], y[k + 1] - y[k]);
            let m = q.grid();
            let (mut values, derivs): (Vec<T>, Vec<T>) = q
                .values()
                .iter()
                .zip(q.derivs())
                .map(|(&v, &d)| {
                    let (gv, gd) = g.eval_with_deriv(x[k] + dx * v);
                    ((gv - y[k]) / dy, gd * dx * d / dy)
                })
                .unzip();
            values[0] = T::zero();
            values[m] = T::one();
            GridDiffeo::new(values, derivs).expect("conjugated piece is a diffeomorphism")
        })
        .collect();
    let mut knots = y;
    let last = knots.len() - 1;
    knots[0] = T::zero();
    knots[last] = T::one();
    GlueInput { knots, pieces }
}

/// `max_i |Q(g(x̄), φ)(s_i) − g(Q(x̄, q)(s_i))|` on an output grid of `m` cells.
pub fn conjugation_defect<T: Real, G: Diffeo<T> + ?Sized>(g: &G, input: &GlueInput<T>, m: usize) -> T {
    let lhs = conjugation_pieces(g, input).q_glue(m);
    let rhs = input.q_glue(m);
    lhs.values()
        .iter()
        .zip(rhs.values())
        .map(|(&a, &b)| (a - g.eval(b)).abs())
        .fold(T::zero(), T::max)
}

/// Where the estimator draws its pieces from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PieceSource {
    /// `A⁻¹` of independent Brownian paths.
    #[default]
    Wiener,
    /// Every piece is the identity (zero-variance stub).
    Identity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorConfig<T> {
    pub delta: f64,
    /// Interior knots of each support tuple; weights are uniform.
    pub support: Vec<Vec<T>>,
    pub samples: usize,
    pub grid: usize,
    pub seed: u64,
    pub pieces: PieceSource,
}

impl<T: Real> EstimatorConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(Error::InvalidInput("δ must lie in (0, 1/2)".into()));
        }
        if self.support.is_empty() {
            return Err(Error::InvalidInput("estimator support is empty".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidInput("sample count must be positive".into()));
        }
        Ok(())
    }
}

const SALT_GLUE: u32 = 6;

/// One draw: a uniformly chosen support tuple and `n` independent pieces.
fn draw<T: Real>(cfg: &EstimatorConfig<T>, i: usize) -> Result<GridDiffeo<T>> {
    let mut rng = path_rng(cfg.seed, SALT_GLUE, i as u64);
    let knots = cfg.support[rng.random_range(0..cfg.support.len())].clone();
    let n = knots.len() + 1;
    let pieces = match cfg.pieces {
        PieceSource::Identity => vec![GridDiffeo::identity(cfg.grid); n],
        PieceSource::Wiener => (0..n).map(|_| a_inv(&brownian_from(cfg.grid, &mut rng))).collect(),
    };
    Ok(GlueInput::new(knots, pieces)?.q_glue(cfg.grid))
}

/// Per-draw `(F(Q), F(g⁻¹ ∘ Q))`; the second entry equals the first without `g`.
fn coupled_samples<T: Real>(f: Functional, g: Option<&dyn Diffeo<T>>, cfg: &EstimatorConfig<T>) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let q = draw(cfg, i)?;
            let plain = f.eval(&q).as_f64();
            let moved = match g {
                None => plain,
                Some(g) => {
                    let values: Vec<T> = q.values().iter().map(|&y| g.inverse(y)).collect();
                    let d0 = q.derivs()[0] / g.eval_with_deriv(T::zero()).1;
                    f.eval_parts(&values, d0).as_f64()
                }
            };
            Ok((plain, moved))
        })
        .collect()
}

/// `L(F)`: mean of `F(Q(x̄, φ))` over uniform support tuples and independent pieces.
pub fn l_estimator<T: Real>(f: Functional, cfg: &EstimatorConfig<T>) -> Result<Estimate> {
    let s = coupled_samples(f, None, cfg)?;
    Ok(Estimate::from_samples(&s.iter().map(|p| p.0).collect::<Vec<_>>()))
}

/// `(L(F), L(F_g), L(F_g) − L(F))` on shared draws, `F_g(f) = F(g⁻¹ ∘ f)`.
pub fn coupled_difference<T: Real>(
    f: Functional,
    g: &dyn Diffeo<T>,
    cfg: &EstimatorConfig<T>,
) -> Result<(Estimate, Estimate, Estimate)> {
    let s = coupled_samples(f, Some(g), cfg)?;
    let (a, b): (Vec<f64>, Vec<f64>) = s.into_iter().unzip();
    Ok((Estimate::from_samples(&a), Estimate::from_samples(&b), Estimate::paired_difference(&b, &a)))
}

/// One support in the schedule of the near-invariance audit.
#[derive(Clone, Debug, PartialEq)]
pub struct Stage<T> {
    pub label: String,
    pub support: Vec<Vec<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrendRow {
    pub stage: String,
    /// pieces per glued map
    pub n: usize,
    pub support_size: usize,
    pub functional: Functional,
    pub g: String,
    pub l_f: Estimate,
    pub l_fg: Estimate,
    pub diff: Estimate,
    pub seed: u64,
}

pub const TREND_HEADERS: [&str; 10] = ["stage", "n", "support_size", "F", "g", "L_F", "L_Fg", "diff", "SE", "seed"];

/// `|L(F_g) − L(F)|` per stage and generator, with coupled-draw SEs. Reported, never asserted.
pub fn theorem3_experiment<T: Real>(
    f: Functional,
    gens: &[&dyn Diffeo<T>],
    stages: &[Stage<T>],
    template: &EstimatorConfig<T>,
) -> Result<Vec<TrendRow>> {
    let mut rows = Vec::new();
    for stage in stages {
        let cfg = EstimatorConfig { support: stage.support.clone(), ..template.clone() };
        let n = stage.support.iter().map(|t| t.len() + 1).max().unwrap_or(1);
        for g in gens {
            let (l_f, l_fg, diff) = coupled_difference(f, *g, &cfg)?;
            rows.push(TrendRow {
                stage: stage.label.clone(),
                n,
                support_size: stage.support.len(),
                functional: f,
                g: g.label(),
                l_f,
                l_fg,
                diff,
                seed: cfg.seed,
            });
        }
    }
    Ok(rows)
}

pub fn trend_table(rows: &[TrendRow]) -> Table {
    let mut t = Table::new("theorem3_trend", &TREND_HEADERS);
    for r in rows {
        t.push([
            r.stage.clone(),
            cell(r.n),
            cell(r.support_size),
            r.functional.name().to_string(),
            r.g.clone(),
            fmt_f64(r.l_f.mean),
            fmt_f64(r.l_fg.mean),
            fmt_f64(r.diff.mean),
            fmt_f64(r.diff.se),
            cell(r.seed),
        ]);
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderReport {
    pub value: f64,
    /// grid pair attaining the Hölder quotient
    pub witness: (f64, f64),
}

/// Grid lower bound for `p_δ(f) = |ln f'(0)| + sup |ln f'(t₂) − ln f'(t₁)| / |t₂ − t₁|^δ`.
pub fn holder_seminorm<T: Real>(q: &GridDiffeo<T>, delta: f64) -> Result<HolderReport> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidInput("δ must lie in (0, 1/2)".into()));
    }
    let m = q.grid();
    let logs: Vec<f64> = q.derivs().iter().map(|d| d.as_f64().ln()).collect();
    let pow: Vec<f64> = (0..=m).map(|d| (d as f64 / m as f64).powf(delta)).collect();
    let (best, i, j) = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut best = (0.0f64, i, i);
            for j in i + 1..=m {
                let v = (logs[j] - logs[i]).abs() / pow[j - i];
                if v > best.0 {
                    best = (v, i, j);
                }
            }
            best
        })
        .reduce(|| (0.0, 0, 0), |a, b| if b.0 > a.0 { b } else { a });
    Ok(HolderReport { value: logs[0].abs() + best, witness: (i as f64 / m as f64, j as f64 / m as f64) })
}
