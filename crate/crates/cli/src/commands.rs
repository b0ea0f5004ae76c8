//! Subcommand plans: parameters are resolved and validated up front, then run.

use std::sync::Arc;

use workbench_core::counting::{counting_audit, enumerate_ink_with_budget, DEFAULT_WORD_BUDGET};
use workbench_core::folner::{folner_audit, BlockPlacement, FolnerBuilder, FolnerConfig};
use workbench_core::glue::{theorem3_experiment, trend_table, Diffeo, EstimatorConfig, GeneratorPair, PieceSource, Stage};
use workbench_core::report::{cell, fmt_f64, Table};
use workbench_core::smoothing::condition_b::{condition_b_audit, GeneratorSet};
use workbench_core::smoothing::lemma6::lemma6_audit;
use workbench_core::smoothing::lemma7::{SymbolicZ, ZParams, ZiVariant};
use workbench_core::smoothing::generators::regularity;
use workbench_core::smoothing::{invariant_suite, SmoothGenerator, Which};
use workbench_core::wiener::{
    concentration_test, constants, lemma3_study, moment_tests, path_rng, quasi_invariance_suite, Functional,
    Lemma2Config, SmoothTestMap, WIENER_HEADERS,
};
use workbench_core::{ActionOrder, Error, PsiModel, Result};

use crate::params::Params;

const PSI_TOL: f64 = 1e-14;
const SALT_SMOOTH: u32 = 7;
const SALT_SUPPORT: u32 = 8;
const SPOT_CHECKS: usize = 50;
/// Orbit enumeration cap for the `count` table; larger cells leave `orbit_size` empty.
const COUNT_ORBIT_BUDGET: u128 = 1 << 14;

#[derive(Clone, Debug, PartialEq)]
pub enum Plan {
    Count { nmax: usize, kmax: usize, budget: u128 },
    Orbits { n: usize, k: usize, order: ActionOrder, budget: u128 },
    Folner { m: usize, ls: Vec<usize>, ns: Vec<usize>, placement: BlockPlacement, budget: u128 },
    Smooth(SmoothPlan),
    Moments { ls: Vec<u32>, samples: usize, grid: usize, seed: u64 },
    Quasi { maps: Vec<SmoothTestMap<f64>>, samples: usize, grid: usize, seed: u64 },
    Lemma2 { a: f64, gaps: usize, epsilon: f64, trials: usize, grid: usize, seed: u64, constant_samples: usize },
    Lemma3 { maps: Vec<SmoothTestMap<f64>>, kmin: u32, kmax: u32 },
    Glue(GluePlan),
    All(Vec<Plan>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothPlan {
    pub resolution: usize,
    pub max_p: u32,
    pub grid: usize,
    pub words: usize,
    pub z: ZParams,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GluePlan {
    pub functional: Functional,
    pub delta: f64,
    pub support: usize,
    /// `p` per stage
    pub stages: Vec<u32>,
    pub z: ZParams,
    pub samples: usize,
    pub grid: usize,
    pub seed: u64,
}

pub fn plan_count(p: &mut Params) -> Plan {
    let nmax = p.get("nmax", 40usize);
    let kmax = p.get("kmax", 8usize);
    let budget = p.get("budget", COUNT_ORBIT_BUDGET);
    p.require(nmax >= 1, "--nmax must be at least 1");
    p.require(kmax >= 1, "--kmax must be at least 1");
    Plan::Count { nmax, kmax, budget }
}

pub fn plan_orbits(p: &mut Params) -> Plan {
    let n = p.get("n", 4usize);
    let k = p.get("k", 2usize);
    let order = match p.get("order", "rightmost".to_string()).as_str() {
        "rightmost" => ActionOrder::RightmostFirst,
        "leftmost" => ActionOrder::LeftmostFirst,
        other => {
            p.diagnose(format!("--order must be rightmost or leftmost, got `{other}`"));
            ActionOrder::RightmostFirst
        }
    };
    let budget = p.get("budget", DEFAULT_WORD_BUDGET);
    p.require(k >= 1, "--k must be at least 1");
    Plan::Orbits { n, k, order, budget }
}

pub fn plan_folner(p: &mut Params) -> Plan {
    let m = p.get("m", 3usize);
    let ls = p.list("l", vec![2usize, 3, 4]);
    let ns = p.list("n", vec![0usize, 1, 2]);
    let placement = match p.get("placement", "chained".to_string()).as_str() {
        "chained" => BlockPlacement::Chained,
        "literal" => BlockPlacement::Literal,
        other => {
            p.diagnose(format!("--placement must be chained or literal, got `{other}`"));
            BlockPlacement::Chained
        }
    };
    let budget = p.get("budget", 1_000_000u128);
    p.require(m <= 4, format!("--m must be at most 4, got {m}"));
    p.require(ls.iter().all(|&l| l >= 1), "--l entries must be at least 1");
    p.require(!ls.is_empty() && !ns.is_empty(), "--l and --n must be nonempty");
    Plan::Folner { m, ls, ns, placement, budget }
}

fn plan_z(p: &mut Params, default_p: u32) -> ZParams {
    let z = ZParams {
        m: p.get("zm", 1usize),
        l: p.get("zl", 2usize),
        n: p.get("zn", 0usize),
        j_max: p.get("j", 3u32),
        p: p.get("p", default_p),
    };
    p.require(z.j_max >= 2, "--j must be at least 2");
    p.require(z.p >= 1, "--p must be at least 1");
    p.require(z.m <= 4, "--zm must be at most 4");
    p.require(z.l >= 1, "--zl must be at least 1");
    z
}

pub fn plan_smooth(p: &mut Params) -> Plan {
    let resolution = p.get("resolution", 1usize << 12);
    p.require(resolution >= 1 << 10, "--resolution must be at least 1024");
    let max_p = p.get("maxp", 6u32);
    p.require((1..=12).contains(&max_p), "--maxp must lie in 1..=12");
    let grid = p.get("grid", 1000usize);
    p.require(grid >= 2, "--grid must be at least 2");
    let words = p.get("words", 3usize);
    p.require((1..=4).contains(&words), "--words must lie in 1..=4");
    let z = plan_z(p, 2);
    let samples = p.samples(1000);
    let seed = p.seed(true);
    Plan::Smooth(SmoothPlan { resolution, max_p, grid, words, z, samples, seed })
}

pub fn plan_moments(p: &mut Params) -> Plan {
    let ls = p.list("l", vec![0u32, 1, 2, 3, 4]);
    p.require(ls.iter().all(|&l| l <= 4), "--l entries must be at most 4");
    p.require(!ls.is_empty(), "--l must be nonempty");
    Plan::Moments { ls, samples: p.samples(200_000), grid: p.grid(1024), seed: p.seed(true) }
}

fn plan_maps(p: &mut Params, default_family: &str) -> Vec<SmoothTestMap<f64>> {
    let a = p.real("a", 0.5);
    let c = p.real("c", 0.5);
    p.require(a != 0.0 && a.is_finite(), "--a must be a nonzero real");
    p.require(c.abs() <= 0.5, "--c must satisfy |c| <= 1/2");
    match p.get("family", default_family.to_string()).as_str() {
        "exp" => vec![SmoothTestMap::Exp { a }],
        "poly" => vec![SmoothTestMap::Poly { c }],
        "both" => vec![SmoothTestMap::Exp { a }, SmoothTestMap::Poly { c }],
        other => {
            p.diagnose(format!("--family must be exp, poly or both, got `{other}`"));
            vec![]
        }
    }
}

pub fn plan_quasi(p: &mut Params) -> Plan {
    let maps = plan_maps(p, "both");
    Plan::Quasi { maps, samples: p.samples(200_000), grid: p.grid(1024), seed: p.seed(true) }
}

pub fn plan_lemma2(p: &mut Params) -> Plan {
    let a = p.real("a", 0.5);
    p.require(a != 0.0 && a.is_finite(), "--a must be a nonzero real");
    let gaps = p.get("n", 64usize);
    p.require(gaps >= 1, "--n must be at least 1");
    let epsilon = p.real("eps", 1.0 / 32.0);
    p.require(epsilon > 0.0 && epsilon <= 1.0, "--eps must lie in (0, 1]");
    p.require(
        gaps == 0 || 1.0 / (gaps as f64) < epsilon,
        format!("mesh 1/{gaps} of the uniform partition must be below --eps"),
    );
    let constant_samples = p.get("constant-samples", 20_000usize);
    p.require(constant_samples > 1, "--constant-samples must be at least 2");
    Plan::Lemma2 { a, gaps, epsilon, trials: p.samples(2000), grid: p.grid(256), seed: p.seed(true), constant_samples }
}

pub fn plan_lemma3(p: &mut Params) -> Plan {
    let maps = plan_maps(p, "both");
    let kmin = p.get("kmin", 3u32);
    let kmax = p.get("kmax", 12u32);
    p.require(1 <= kmin && kmin < kmax && kmax <= 24, "need 1 <= --kmin < --kmax <= 24");
    Plan::Lemma3 { maps, kmin, kmax }
}

pub fn plan_glue(p: &mut Params) -> Plan {
    let functional = p.get("functional", Functional::Midpoint);
    let delta = p.real("delta", 0.25);
    p.require(delta > 0.0 && delta < 0.5, "δ must lie in (0, 1/2)");
    let support = p.get("support", 32usize);
    p.require(support >= 1, "--support must be at least 1");
    let stages = p.list("stages", vec![2u32, 4, 8]);
    p.require(!stages.is_empty() && stages.iter().all(|&s| s >= 1), "--stages must list positive p values");
    let z = plan_z(p, 2);
    Plan::Glue(GluePlan { functional, delta, support, stages, z, samples: p.samples(2000), grid: p.grid(128), seed: p.seed(true) })
}

/// Every experiment at its defaults; only the global keys carry over.
pub fn plan_all(p: &mut Params) -> Plan {
    let planners: [fn(&mut Params) -> Plan; 8] =
        [plan_count, plan_folner, plan_smooth, plan_moments, plan_quasi, plan_lemma2, plan_lemma3, plan_glue];
    let mut plans = Vec::with_capacity(planners.len());
    for plan in planners {
        let mut sub = p.globals();
        plans.push(plan(&mut sub));
        p.absorb(sub);
    }
    Plan::All(plans)
}

pub fn execute(plan: &Plan) -> Result<Vec<Table>> {
    match plan {
        Plan::Count { nmax, kmax, budget } => Ok(vec![counting_audit(*nmax, *kmax, *budget)?]),
        Plan::Orbits { n, k, order, budget } => {
            let set = enumerate_ink_with_budget(*n, *k, *order, *budget)?;
            let mut t = Table::new("orbits", &["n", "k", "order", "index", "tuple"]);
            let o = if *order == ActionOrder::RightmostFirst { "rightmost" } else { "leftmost" };
            for (i, tuple) in set.tuples.iter().enumerate() {
                t.push([cell(n), cell(k), o.to_string(), cell(i), tuple.to_string()]);
            }
            Ok(vec![t])
        }
        Plan::Folner { m, ls, ns, placement, budget } => {
            let config = FolnerConfig { placement: *placement, tuple_budget: *budget, ..FolnerConfig::default() };
            let mut builder = FolnerBuilder::new(config);
            let pairs: Vec<(usize, usize)> = ls.iter().flat_map(|&l| ns.iter().map(move |&n| (l, n))).collect();
            Ok(vec![folner_audit(&mut builder, &pairs, *m)?])
        }
        Plan::Smooth(s) => run_smooth(s),
        Plan::Moments { ls, samples, grid, seed } => {
            let mut t = Table::new("wiener_moments", &WIENER_HEADERS);
            for r in moment_tests::<f64>(ls, *samples, *grid, *seed)? {
                r.push_rows(&mut t);
            }
            Ok(vec![t])
        }
        Plan::Quasi { maps, samples, grid, seed } => {
            let mut t = Table::new("quasi_invariance", &WIENER_HEADERS);
            for r in quasi_invariance_suite(maps, *samples, *grid, *seed) {
                r.push_rows(&mut t);
            }
            Ok(vec![t])
        }
        Plan::Lemma2 { a, gaps, epsilon, trials, grid, seed, constant_samples } => {
            let g = SmoothTestMap::Exp { a: *a };
            let params = constants(&g, *constant_samples, *grid, *seed);
            let interior: Vec<f64> = (1..*gaps).map(|i| i as f64 / *gaps as f64).collect();
            let cfg = Lemma2Config { epsilon: *epsilon, trials: *trials, grid: *grid, seed: *seed, c1: params.c1 };
            let report = concentration_test(&g, &interior, cfg)?;
            let mut t = Table::new("lemma2", &WIENER_HEADERS);
            report.push_rows(&mut t);
            for (l, e) in params.moments.iter().enumerate() {
                t.push([
                    "moment_at1".into(),
                    format!("l={l};samples={constant_samples}"),
                    fmt_f64(e.mean),
                    fmt_f64(e.se),
                    String::new(),
                    "report".into(),
                    cell(seed),
                    cell(grid),
                ]);
            }
            t.push([
                "energy".into(),
                format!("samples={constant_samples}"),
                fmt_f64(params.energy.mean),
                fmt_f64(params.energy.se),
                String::new(),
                "report".into(),
                cell(seed),
                cell(grid),
            ]);
            Ok(vec![t])
        }
        Plan::Lemma3 { maps, kmin, kmax } => {
            let mut t = Table::new("lemma3", &WIENER_HEADERS);
            for g in maps {
                lemma3_study(g, *kmin..=*kmax).push_rows(&mut t);
            }
            Ok(vec![t])
        }
        Plan::Glue(g) => run_glue(g),
        Plan::All(plans) => {
            let mut out = Vec::new();
            for p in plans {
                out.extend(execute(p)?);
            }
            Ok(out)
        }
    }
}

fn flag(pass: bool) -> String {
    if pass { "pass" } else { "fail" }.to_string()
}

fn psi_model(resolution: usize) -> Result<Arc<PsiModel>> {
    Ok(Arc::new(PsiModel::build(resolution, PSI_TOL)?))
}

fn run_smooth(s: &SmoothPlan) -> Result<Vec<Table>> {
    let psi = psi_model(s.resolution)?;
    let g1 = SmoothGenerator::new(psi.clone(), Which::G1);
    let g2 = SmoothGenerator::new(psi.clone(), Which::G2);

    let inv = invariant_suite(&psi, s.resolution);
    let mut roundtrip = 0.0f64;
    for j in -8i32..=8 {
        for i in 0..=400 {
            let t = 4.0 * i as f64 / 400.0;
            roundtrip = roundtrip.max((psi.iter(-j, psi.iter(j, t)) - t).abs());
        }
    }
    let mut psi_t = Table::new("psi_invariants", &["metric", "value", "bound", "flag"]);
    let rows: [(&str, f64, &str, bool); 10] = [
        ("periodicity_defect", inv.periodicity_defect, "<1e-9", inv.periodicity_defect < 1e-9),
        ("min_deriv", inv.min_deriv, ">0", inv.min_deriv > 0.0),
        ("max_deriv", inv.max_deriv, "<=3", inv.max_deriv <= 3.0),
        ("plateau_defect", inv.plateau_defect, "<1e-12", inv.plateau_defect < 1e-12),
        ("psi_zero", inv.psi_zero, "=0", inv.psi_zero == 0.0),
        ("psi_quarter_error", inv.psi_quarter_error, "<1e-9", inv.psi_quarter_error < 1e-9),
        ("deriv_zero", inv.deriv_zero, "=1", (inv.deriv_zero - 1.0).abs() < 1e-12),
        ("flatness_constant", inv.flatness_constant, "<=1", inv.flatness_constant <= 1.0),
        ("min_increment", inv.min_increment, ">0", inv.min_increment > 0.0),
        ("iterate_roundtrip", roundtrip, "<1e-9", roundtrip < 1e-9),
    ];
    for (name, v, bound, ok) in rows {
        psi_t.push([name.to_string(), fmt_f64(v), bound.to_string(), flag(ok)]);
    }
    psi_t.push(["calibration_constant".into(), fmt_f64(psi.calibration_constant()), String::new(), "report".into()]);

    let mut reg_t = Table::new("regularity", &["generator", "metric", "value", "bound", "flag"]);
    for g in [&g1, &g2] {
        let r = regularity(g, s.grid);
        let rows: [(&str, f64, &str, bool); 7] = [
            ("deriv_at_0", r.deriv_at_0, "|x-1|<1e-6", (r.deriv_at_0 - 1.0).abs() < 1e-6),
            ("deriv_at_1", r.deriv_at_1, "|x-1|<1e-6", (r.deriv_at_1 - 1.0).abs() < 1e-6),
            ("value_mismatch", r.max_value_mismatch, "<1e-9", r.max_value_mismatch < 1e-9),
            ("c1_jump", r.max_jumps[0], "<1e-5", r.max_jumps[0] < 1e-5),
            ("c2_jump", r.max_jumps[1], "<1e-5", r.max_jumps[1] < 1e-5),
            ("c3_jump", r.max_jumps[2], "<1e-3", r.max_jumps[2] < 1e-3),
            ("strictly_increasing", if r.strictly_increasing { 1.0 } else { 0.0 }, "=1", r.strictly_increasing),
        ];
        for (name, v, bound, ok) in rows {
            reg_t.push([g.name(), name.to_string(), fmt_f64(v), bound.to_string(), flag(ok)]);
        }
    }

    let l6 = lemma6_audit([&g1, &g2], s.max_p, s.grid)?;
    let (cond_b, _) = condition_b_audit(&GeneratorSet::new(psi.clone()), s.words, s.grid);
    let l7 = lemma7_table(s, psi)?;
    Ok(vec![psi_t, reg_t, l6, cond_b, l7])
}

fn lemma7_table(s: &SmoothPlan, psi: Arc<PsiModel>) -> Result<Table> {
    let z = &s.z;
    let mut builder = FolnerBuilder::new(FolnerConfig::default());
    let zs: SymbolicZ<f64> = SymbolicZ::build(*z, &mut builder, psi.clone())?;
    let params = format!("m={};l={};n={};J={};p={}", z.m, z.l, z.n, z.j_max, z.p);
    let mut t = Table::new("lemma7", &["metric", "parameters", "value", "bound", "flag", "seed"]);
    let seed = cell(s.seed);
    let mut push = |metric: &str, value: String, bound: String, fl: String| {
        t.push([metric.to_string(), params.clone(), value, bound, fl, seed.clone()]);
    };

    let mut rng = path_rng(s.seed, SALT_SMOOTH, 0);
    let elems: Vec<_> = (0..s.samples).map(|_| zs.sample(&mut rng)).collect();
    let want = zs.k * (2 * z.p as usize + 1) - 1;
    let mut exact = 0usize;
    let (mut inner, mut full) = (0.0f64, 0.0f64);
    for e in &elems {
        let coords = zs.realize(e)?;
        if coords.len() == want && zs.coordinate_count() == want {
            exact += 1;
        }
        let (a, b) = zs.meshes(&coords);
        inner = inner.max(a);
        full = full.max(b);
    }
    push("coordinate_count", cell(exact), cell(s.samples), flag(exact == s.samples));
    push("coordinates_per_element", cell(want), String::new(), "report".into());
    push("x_size", cell(zs.x().len()), String::new(), "report".into());
    push("cardinality", cell(zs.cardinality()), String::new(), "report".into());

    for which in [Which::G1, Which::G2] {
        for (label, v) in [("default", ZiVariant::DEFAULT), ("printed", ZiVariant::PRINTED)] {
            let r = zs.inclusion_audit(which, v)?;
            let fl = if label == "default" { flag(r.passes()) } else { "report".into() };
            push(
                &format!("inclusion_{}_{label}", which.name()),
                format!("{}+{}", r.x_failures, r.index_failures),
                format!("0 of {}", r.x_part_size),
                fl,
            );
            let f = zs.zi_fraction(which, v);
            push(&format!("zi_fraction_{}_{label}", which.name()), f.to_string(), String::new(), "report".into());
        }
    }

    let c = zs.constant_c(1000)?;
    let bound = c / (4.0 * z.p as f64);
    push("constant_C", fmt_f64(c), String::new(), "report".into());
    push("inblock_mesh", fmt_f64(inner), fmt_f64(bound), flag(inner <= bound));
    push("full_mesh", fmt_f64(full), fmt_f64(bound), flag(full <= bound));

    for g in [SmoothGenerator::new(psi.clone(), Which::G1), SmoothGenerator::new(psi.clone(), Which::G2)] {
        let spot: Vec<_> = (0..SPOT_CHECKS).filter_map(|_| zs.sample_zi(g.which, ZiVariant::DEFAULT, &mut rng)).collect();
        let err = zs.image_spot_check(&g, &spot)?;
        push(&format!("image_error_{}", g.name()), fmt_f64(err), "<1e-9".into(), flag(err < 1e-9));
    }
    let dup = zs.distinctness_violations(&elems, 1e-12)?;
    push("distinctness_violations", cell(dup), "0".into(), flag(dup == 0));
    Ok(t)
}

fn run_glue(g: &GluePlan) -> Result<Vec<Table>> {
    let psi = psi_model(1 << 12)?;
    let g1 = GeneratorPair::new(SmoothGenerator::new(psi.clone(), Which::G1));
    let g2 = GeneratorPair::new(SmoothGenerator::new(psi.clone(), Which::G2));
    let mut stages = Vec::with_capacity(g.stages.len());
    for (i, &p) in g.stages.iter().enumerate() {
        let params = ZParams { p, ..g.z };
        let mut builder = FolnerBuilder::new(FolnerConfig::default());
        let zs: SymbolicZ<f64> = SymbolicZ::build(params, &mut builder, psi.clone())?;
        let mut rng = path_rng(g.seed, SALT_SUPPORT, i as u64);
        let support = (0..g.support).map(|_| zs.realize(&zs.sample(&mut rng))).collect::<Result<Vec<_>>>()?;
        let label = format!(
            "p={p};J={};m={};l={};n={};delta={};samples={};grid={}",
            g.z.j_max, g.z.m, g.z.l, g.z.n, g.delta, g.samples, g.grid
        );
        stages.push(Stage { label, support });
    }
    let template = EstimatorConfig {
        delta: g.delta,
        support: Vec::new(),
        samples: g.samples,
        grid: g.grid,
        seed: g.seed,
        pieces: PieceSource::Wiener,
    };
    let gens: [&dyn Diffeo<f64>; 2] = [&g1, &g2];
    let rows = theorem3_experiment(g.functional, &gens, &stages, &template)?;
    Ok(vec![trend_table(&rows)])
}

/// Budget overruns are configuration-level failures.
pub fn is_budget(e: &Error) -> bool {
    matches!(e, Error::BudgetExceeded { .. })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn params(pairs: &[(&str, &str)]) -> Params {
        Params::new(BTreeMap::new(), pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect())
    }

    #[test]
    fn defaults() {
        let mut p = params(&[]);
        assert_eq!(plan_count(&mut p), Plan::Count { nmax: 40, kmax: 8, budget: COUNT_ORBIT_BUDGET });
        let Plan::Folner { m, ls, ns, placement, .. } = plan_folner(&mut p) else { panic!() };
        assert_eq!((m, ls, ns, placement), (3, vec![2, 3, 4], vec![0, 1, 2], BlockPlacement::Chained));
        assert!(p.finish().is_empty());
    }

    #[test]
    fn stochastic_plans_need_a_seed() {
        for plan in [plan_smooth, plan_moments, plan_quasi, plan_lemma2, plan_glue] {
            let mut p = params(&[]);
            plan(&mut p);
            assert!(p.finish().iter().any(|d| d.contains("--seed")));
        }
        let mut p = params(&[]);
        plan_lemma3(&mut p);
        assert!(p.finish().is_empty());
    }

    #[test]
    fn range_violations() {
        let mut p = params(&[("seed", "1"), ("n", "16"), ("eps", "1/32")]);
        plan_lemma2(&mut p);
        assert!(p.finish().iter().any(|d| d.contains("mesh")));
        let mut p = params(&[("seed", "1"), ("family", "cubic"), ("c", "0.75")]);
        plan_quasi(&mut p);
        assert_eq!(p.finish().len(), 2);
        let mut p = params(&[("m", "5"), ("placement", "spread")]);
        plan_folner(&mut p);
        assert_eq!(p.finish().len(), 2);
        let mut p = params(&[("kmin", "5"), ("kmax", "5")]);
        plan_lemma3(&mut p);
        assert_eq!(p.finish().len(), 1);
    }

    #[test]
    fn audit_all_uses_defaults_with_global_overrides() {
        let mut p = params(&[("seed", "4"), ("samples", "10")]);
        let Plan::All(plans) = plan_all(&mut p) else { panic!() };
        assert!(p.finish().is_empty());
        assert_eq!(plans.len(), 8);
        assert!(plans.iter().any(|q| matches!(q, Plan::Moments { samples: 10, seed: 4, .. })));
        assert!(plans.iter().any(|q| matches!(q, Plan::Glue(g) if g.stages == vec![2, 4, 8])));
    }

    #[test]
    fn lemma3_table() {
        let plan = Plan::Lemma3 { maps: vec![SmoothTestMap::Poly { c: 0.5 }], kmin: 3, kmax: 6 };
        let t = &execute(&plan).unwrap()[0];
        assert_eq!(t.name(), "lemma3");
        assert!(t.rows().iter().all(|r| r.len() == WIENER_HEADERS.len()));
    }

    #[test]
    fn orbit_table_matches_enumeration() {
        let plan = Plan::Orbits { n: 4, k: 2, order: ActionOrder::RightmostFirst, budget: DEFAULT_WORD_BUDGET };
        let t = &execute(&plan).unwrap()[0];
        let set = enumerate_ink_with_budget(4, 2, ActionOrder::RightmostFirst, DEFAULT_WORD_BUDGET).unwrap();
        assert_eq!(t.rows().len(), set.len());
        assert_eq!(t.get(0, "order"), Some("rightmost"));
    }
}
