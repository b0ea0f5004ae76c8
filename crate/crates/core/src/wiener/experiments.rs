//! Monte Carlo audits: endpoint-moment symmetry, two-sided quasi-invariance,
//! concentration of the density exponent, and the telescoping product.

use super::density::{density, lemma2_sums};
use super::{a_inv, map_paths, GridDiffeo, Path, SmoothTestMap};
use crate::error::{Error, Result};
use crate::report::{cell, fmt_f64, Table};
use crate::scalar::{trapezoid, Real};
use crate::stats::Estimate;

const SALT_MOMENTS: u32 = 3;
const SALT_QUASI: u32 = 4;
const SALT_LEMMA2: u32 = 5;

/// Columns shared by the four Wiener reports.
pub const WIENER_HEADERS: [&str; 8] =
    ["experiment", "parameters", "estimate", "se", "bound", "flag", "seed", "grid"];

/// Relative tolerance for the per-path reversal identity (rounding only).
pub const REVERSAL_TOL: f64 = 1e-12;

fn flag(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub l: u32,
    pub samples: usize,
    pub grid: usize,
    pub seed: u64,
    /// `E[q'(0)^l]`
    pub at0: Estimate,
    /// `E[q'(1)^l]`
    pub at1: Estimate,
    /// paired `q'(0)^l − q'(1)^l`
    pub diff: Estimate,
    /// max relative gap between `q'(0)` of reversed paths and `q'(1)` of the originals
    pub reversal_defect: f64,
}

impl MomentReport {
    /// Only `l <= 2` is asserted; higher moments have heavy tails.
    pub fn asserted(&self) -> bool {
        self.l <= 2
    }

    pub fn passes(&self) -> bool {
        self.diff.within(4.0, 0.0) && self.reversal_defect < REVERSAL_TOL
    }

    pub fn push_rows(&self, t: &mut Table) {
        let p = format!("l={};samples={}", self.l, self.samples);
        let (seed, grid) = (cell(self.seed), cell(self.grid));
        for (name, e) in [("moment_at0", &self.at0), ("moment_at1", &self.at1)] {
            t.push([name.into(), p.clone(), fmt_f64(e.mean), fmt_f64(e.se), String::new(), "report".into(), seed.clone(), grid.clone()]);
        }
        let f = if self.asserted() { flag(self.passes()) } else { "report" };
        t.push(["moment_diff".into(), p.clone(), fmt_f64(self.diff.mean), fmt_f64(self.diff.se), fmt_f64(4.0 * self.diff.se), f.into(), seed.clone(), grid.clone()]);
        t.push([
            "reversal_defect".into(),
            p,
            fmt_f64(self.reversal_defect),
            String::new(),
            fmt_f64(REVERSAL_TOL),
            flag(self.reversal_defect < REVERSAL_TOL).into(),
            seed,
            grid,
        ]);
    }
}

/// Moment symmetry for each `l` in `ls`, sharing one set of paths.
pub fn moment_tests<T: Real>(ls: &[u32], samples: usize, m: usize, seed: u64) -> Result<Vec<MomentReport>> {
    if let Some(l) = ls.iter().find(|&&l| l > 4) {
        return Err(Error::InvalidInput(format!("moment order {l} exceeds 4")));
    }
    let per_path: Vec<[f64; 3]> = map_paths(samples, m, seed, SALT_MOMENTS, |p: &Path<T>| {
        let q = a_inv(p);
        let (d0, d1) = (q.derivs()[0].as_f64(), q.derivs()[m].as_f64());
        let r0 = a_inv(&p.reverse()).derivs()[0].as_f64();
        [d0, d1, ((r0 - d1) / d1).abs()]
    });
    let reversal_defect = per_path.iter().map(|s| s[2]).fold(0.0, f64::max);
    Ok(ls
        .iter()
        .map(|&l| {
            let a: Vec<f64> = per_path.iter().map(|s| s[0].powi(l as i32)).collect();
            let b: Vec<f64> = per_path.iter().map(|s| s[1].powi(l as i32)).collect();
            MomentReport {
                l,
                samples,
                grid: m,
                seed,
                at0: Estimate::from_samples(&a),
                at1: Estimate::from_samples(&b),
                diff: Estimate::paired_difference(&a, &b),
                reversal_defect,
            }
        })
        .collect())
}

pub fn moment_test<T: Real>(l: u32, samples: usize, m: usize, seed: u64) -> Result<MomentReport> {
    Ok(moment_tests::<T>(&[l], samples, m, seed)?.remove(0))
}

/// Test functionals for the quasi-invariance identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Functional {
    /// `q(1/2)`
    Midpoint,
    /// `exp(−∫ q²)`
    Gaussian,
    /// `min(q'(0), CAP)`
    CappedSlope,
    /// `1`
    One,
}

impl Functional {
    pub const ALL: [Functional; 3] = [Functional::Midpoint, Functional::Gaussian, Functional::CappedSlope];
    pub const CAP: f64 = 5.0;

    /// `(inf F, sup F)` over increasing diffeomorphisms.
    pub fn range(self) -> (f64, f64) {
        match self {
            Functional::Midpoint => (0.0, 1.0),
            Functional::Gaussian => ((-1.0f64).exp(), 1.0),
            Functional::CappedSlope => (0.0, Self::CAP),
            Functional::One => (1.0, 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Functional::Midpoint => "q(1/2)",
            Functional::Gaussian => "exp(-int q^2)",
            Functional::CappedSlope => "min(q'(0),5)",
            Functional::One => "1",
        }
    }

    pub fn eval<T: Real>(self, q: &GridDiffeo<T>) -> T {
        self.eval_parts(q.values(), q.derivs()[0])
    }

    /// From grid values (even grid) and `q'(0)` alone.
    pub fn eval_parts<T: Real>(self, values: &[T], d0: T) -> T {
        match self {
            Functional::Midpoint => values[values.len() / 2],
            Functional::Gaussian => {
                let sq: Vec<T> = values.iter().map(|&v| v * v).collect();
                (-trapezoid(&sq)).exp()
            }
            Functional::CappedSlope => d0.min(T::lit(Self::CAP)),
            Functional::One => T::one(),
        }
    }
}

impl std::str::FromStr for Functional {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "midpoint" => Ok(Functional::Midpoint),
            "gaussian" => Ok(Functional::Gaussian),
            "slope" => Ok(Functional::CappedSlope),
            "one" => Ok(Functional::One),
            other => Err(Error::Parse(format!("unknown functional `{other}` (midpoint, gaussian, slope, one)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiReport {
    pub map: String,
    pub functional: Functional,
    pub samples: usize,
    pub grid: usize,
    pub seed: u64,
    /// `E[F(g⁻¹ ∘ q)]`
    pub lhs: Estimate,
    /// `E[F(q) ρ(g, q)]`
    pub rhs: Estimate,
    /// paired `lhs − rhs` at grid `M`
    pub diff: Estimate,
    /// the same at grid `2M`
    pub diff_fine: Estimate,
}

impl QuasiReport {
    /// Discretization allowance `|D(M) − D(2M)|`.
    pub fn allowance(&self) -> f64 {
        (self.diff.mean - self.diff_fine.mean).abs()
    }

    pub fn passes(&self) -> bool {
        self.diff.within(4.0, self.allowance())
    }

    pub fn push_rows(&self, t: &mut Table) {
        let p = format!("g={};F={};samples={}", self.map, self.functional.name(), self.samples);
        let seed = cell(self.seed);
        let (g1, g2) = (cell(self.grid), cell(2 * self.grid));
        let blank = String::new;
        t.push(["lhs".into(), p.clone(), fmt_f64(self.lhs.mean), fmt_f64(self.lhs.se), blank(), "report".into(), seed.clone(), g1.clone()]);
        t.push(["rhs".into(), p.clone(), fmt_f64(self.rhs.mean), fmt_f64(self.rhs.se), blank(), "report".into(), seed.clone(), g1.clone()]);
        t.push([
            "diff".into(),
            p.clone(),
            fmt_f64(self.diff.mean),
            fmt_f64(self.diff.se),
            fmt_f64(4.0 * self.diff.se + self.allowance()),
            flag(self.passes()).into(),
            seed.clone(),
            g1.clone(),
        ]);
        t.push(["diff_fine".into(), p.clone(), fmt_f64(self.diff_fine.mean), fmt_f64(self.diff_fine.se), blank(), "report".into(), seed.clone(), g2]);
        t.push(["allowance".into(), p, fmt_f64(self.allowance()), blank(), blank(), "report".into(), seed, g1]);
    }
}

/// Per map and functional, paired samples `(F(g⁻¹∘q), F(q) ρ)` on one path set.
fn quasi_samples<T: Real>(maps: &[SmoothTestMap<T>], samples: usize, m: usize, seed: u64) -> Vec<Vec<(f64, f64)>> {
    let per_path: Vec<Vec<(f64, f64)>> = map_paths(samples, m, seed, SALT_QUASI, |p: &Path<T>| {
        let q = a_inv(p);
        let fq: Vec<T> = Functional::ALL.iter().map(|f| f.eval(&q)).collect();
        let mut out = Vec::with_capacity(maps.len() * 3);
        for g in maps {
            let rho = density(g, &q);
            // g⁻¹ ∘ q; only its derivative at 0 is needed
            let pulled = g.inverse_increasing(q.values());
            let d0 = q.derivs()[0] / g.deriv(T::zero());
            for (f, &v) in Functional::ALL.iter().zip(&fq) {
                out.push((f.eval_parts(&pulled, d0).as_f64(), (v * rho).as_f64()));
            }
        }
        out
    });
    (0..maps.len() * 3).map(|j| per_path.iter().map(|s| s[j]).collect()).collect()
}

/// Both sides of `E[F(g⁻¹∘q)] = E[F(q) ρ(g, q)]` for every map and functional,
/// at grid `M` and again at `2M` for the discretization allowance.
pub fn quasi_invariance_suite<T: Real>(maps: &[SmoothTestMap<T>], samples: usize, m: usize, seed: u64) -> Vec<QuasiReport> {
    let coarse = quasi_samples(maps, samples, m, seed);
    let fine = quasi_samples(maps, samples, 2 * m, seed);
    let split = |v: &[(f64, f64)]| -> (Vec<f64>, Vec<f64>) { v.iter().copied().unzip() };
    let mut out = Vec::new();
    for (i, g) in maps.iter().enumerate() {
        for (j, &f) in Functional::ALL.iter().enumerate() {
            let (a, b) = split(&coarse[3 * i + j]);
            let (af, bf) = split(&fine[3 * i + j]);
            out.push(QuasiReport {
                map: g.name(),
                functional: f,
                samples,
                grid: m,
                seed,
                lhs: Estimate::from_samples(&a),
                rhs: Estimate::from_samples(&b),
                diff: Estimate::paired_difference(&a, &b),
                diff_fine: Estimate::paired_difference(&af, &bf),
            });
        }
    }
    out
}

pub fn quasi_invariance_test<T: Real>(g: &SmoothTestMap<T>, f: Functional, samples: usize, m: usize, seed: u64) -> QuasiReport {
    quasi_invariance_suite(std::slice::from_ref(g), samples, m, seed)
        .into_iter()
        .find(|r| r.functional == f)
        .expect("every functional is reported")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma2Config {
    pub epsilon: f64,
    pub trials: usize,
    /// grid of each sampled `q_k`
    pub grid: usize,
    pub seed: u64,
    pub c1: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma2Report {
    pub map: String,
    pub gaps: usize,
    pub config: Lemma2Config,
    pub c_g: f64,
    pub mesh: f64,
    /// `4 c₁ C_g ∛ε`
    pub threshold: f64,
    /// indicator of `|f₁ + f₂| >= threshold`
    pub exceedance: Estimate,
    pub f1: Estimate,
    pub f2: Estimate,
}

impl Lemma2Report {
    /// `2 ∛ε`
    pub fn bound(&self) -> f64 {
        2.0 * self.config.epsilon.cbrt()
    }

    pub fn passes(&self) -> bool {
        self.exceedance.mean <= self.bound() + 4.0 * self.exceedance.se
    }

    pub fn push_rows(&self, t: &mut Table) {
        let c = &self.config;
        let p = format!("g={};n={};eps={};trials={};c1={};C_g={}", self.map, self.gaps, c.epsilon, c.trials, fmt_f64(c.c1), fmt_f64(self.c_g));
        let (seed, grid) = (cell(c.seed), cell(c.grid));
        t.push([
            "exceedance".into(),
            p.clone(),
            fmt_f64(self.exceedance.mean),
            fmt_f64(self.exceedance.se),
            fmt_f64(self.bound() + 4.0 * self.exceedance.se),
            flag(self.passes()).into(),
            seed.clone(),
            grid.clone(),
        ]);
        t.push(["threshold".into(), p.clone(), fmt_f64(self.threshold), String::new(), String::new(), "report".into(), seed.clone(), grid.clone()]);
        t.push(["mesh".into(), p.clone(), fmt_f64(self.mesh), String::new(), fmt_f64(c.epsilon), flag(self.mesh < c.epsilon).into(), seed.clone(), grid.clone()]);
        for (name, e) in [("f1", &self.f1), ("f2", &self.f2)] {
            t.push([name.into(), p.clone(), fmt_f64(e.mean), fmt_f64(e.se), String::new(), "report".into(), seed.clone(), grid.clone()]);
        }
    }
}

/// Empirical `P(|f₁ + f₂| >= 4 c₁ C_g ∛ε)` over `trials` draws of `n` independent `q_k`.
pub fn concentration_test<T: Real>(g: &SmoothTestMap<T>, interior: &[T], config: Lemma2Config) -> Result<Lemma2Report> {
    let mut knots = vec![0.0];
    knots.extend(interior.iter().map(|x| x.as_f64()));
    knots.push(1.0);
    if knots.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("partition must be strictly increasing inside (0, 1)".into()));
    }
    let mesh = knots.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if !(mesh < config.epsilon) {
        return Err(Error::MeshViolation { mesh, epsilon: config.epsilon });
    }
    let gaps = interior.len() + 1;
    let c_g = g.c_g(super::density::C_G_GRID).as_f64();
    let threshold = 4.0 * config.c1 * c_g * config.epsilon.cbrt();
    let per_trial: Vec<(f64, f64)> = {
        use rayon::prelude::*;
        (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let qs: Vec<GridDiffeo<T>> = (0..gaps)
                    .map(|k| {
                        let idx = (trial * gaps + k) as u64;
                        a_inv(&super::brownian_from(config.grid, &mut super::path_rng(config.seed, SALT_LEMMA2, idx)))
                    })
                    .collect();
                let (f1, f2) = lemma2_sums(g, interior, &qs);
                (f1.as_f64(), f2.as_f64())
            })
            .collect()
    };
    let hits: Vec<f64> = per_trial.iter().map(|(a, b)| if (a + b).abs() >= threshold { 1.0 } else { 0.0 }).collect();
    let (f1, f2): (Vec<f64>, Vec<f64>) = per_trial.into_iter().unzip();
    Ok(Lemma2Report {
        map: g.name(),
        gaps,
        config,
        c_g,
        mesh,
        threshold,
        exceedance: Estimate::from_samples(&hits),
        f1: Estimate::from_samples(&f1),
        f2: Estimate::from_samples(&f2),
    })
}

/// `Π (g(x_k) − g(x_{k−1})) / ((x_k − x_{k−1}) √(g'(x_k) g'(x_{k−1})))` over `0, interior…, 1`.
pub fn telescoping_product<T: Real>(g: &SmoothTestMap<T>, interior: &[T]) -> T {
    let mut knots = Vec::with_capacity(interior.len() + 2);
    knots.push(T::zero());
    knots.extend_from_slice(interior);
    knots.push(T::one());
    let jets: Vec<[T; 4]> = knots.iter().map(|&x| g.jet(x)).collect();
    let mut prod = T::one();
    for k in 1..knots.len() {
        let (a, b) = (&jets[k - 1], &jets[k]);
        prod = prod * (b[0] - a[0]) / ((knots[k] - knots[k - 1]) * (a[1] * b[1]).sqrt());
    }
    prod
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma3Report {
    pub map: String,
    /// `(n, product)` over uniform partitions into `n` cells
    pub products: Vec<(usize, f64)>,
    /// least-squares slope of `ln |product − 1|` against `ln n`
    pub slope: f64,
}

impl Lemma3Report {
    pub const SLOPE_RANGE: (f64, f64) = (-1.3, -0.8);

    pub fn passes(&self) -> bool {
        self.slope >= Self::SLOPE_RANGE.0 && self.slope <= Self::SLOPE_RANGE.1
    }

    pub fn push_rows(&self, t: &mut Table) {
        for &(n, p) in &self.products {
            t.push([
                "abs_error".into(),
                format!("g={};n={n}", self.map),
                fmt_f64((p - 1.0).abs()),
                String::new(),
                String::new(),
                "report".into(),
                "none".into(),
                cell(n),
            ]);
        }
        let ns: Vec<String> = self.products.iter().map(|p| p.0.to_string()).collect();
        t.push([
            "slope".into(),
            format!("g={};n={}", self.map, ns.join("|")),
            fmt_f64(self.slope),
            String::new(),
            format!("[{},{}]", Self::SLOPE_RANGE.0, Self::SLOPE_RANGE.1),
            flag(self.passes()).into(),
            "none".into(),
            ns.last().cloned().unwrap_or_default(),
        ]);
    }
}

/// Products on uniform partitions `n = 2^k`, `k` in `ks`, with the log-log slope.
pub fn lemma3_study<T: Real>(g: &SmoothTestMap<T>, ks: std::ops::RangeInclusive<u32>) -> Lemma3Report {
    let products: Vec<(usize, f64)> = ks
        .map(|k| {
            let n = 1usize << k;
            let nf = T::from_usize_lossy(n);
            let interior: Vec<T> = (1..n).map(|i| T::from_usize_lossy(i) / nf).collect();
            (n, telescoping_product(g, &interior).as_f64())
        })
        .collect();
    let pts: Vec<(f64, f64)> = products.iter().map(|&(n, p)| ((n as f64).ln(), (p - 1.0).abs().ln())).collect();
    let len = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / len, pts.iter().map(|p| p.1).sum::<f64>() / len);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Lemma3Report { map: g.name(), products, slope: sxy / sxx }
}
