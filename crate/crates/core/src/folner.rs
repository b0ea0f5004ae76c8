//! The tuple families `Y`, `X` built from orbit sets, the midpoint refinement κ,
//! and exact Følner ratios `|g(S) ∩ S| / |S|`.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::counting::{enumerate_ink_with_budget, DEFAULT_WORD_BUDGET};
use crate::dyadic::{mesh, standard_point, ActionOrder, Dyadic, DyadicTuple, Generator, PlMap};
use crate::error::{Error, Result};
use crate::report::{cell, fmt_f64, Table};

/// Where block `i` of `Y_{l, n_1..n_l}` is taken from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BlockPlacement {
    /// `f1^{-(i-1)}(I_{n_i}^{l-i})`, spanning `[r_{i-1}, r_i]`.
    #[default]
    Chained,
    /// `f1^i(I_{n_i}^{l-i})`, spanning `[r_{-i}, r_{1-i}]`; blocks are merged in
    /// increasing order.
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Y,
    Yln,
    Yln0,
    X,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub family: Family,
    pub l: usize,
    pub n: usize,
    pub m: usize,
}

impl Provenance {
    pub fn custom() -> Self {
        Provenance { family: Family::Custom, l: 0, n: 0, m: 0 }
    }
}

/// A finite set of equal-length tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleSet {
    pub tuples: BTreeSet<DyadicTuple>,
    pub provenance: Provenance,
}

impl TupleSet {
    /// Rejects mixed tuple lengths.
    pub fn new(tuples: BTreeSet<DyadicTuple>, provenance: Provenance) -> Result<Self> {
        let mut lens = tuples.iter().map(DyadicTuple::len);
        if let Some(first) = lens.next() {
            if lens.any(|l| l != first) {
                return Err(Error::InvalidInput("tuple set has mixed lengths".into()));
            }
        }
        Ok(TupleSet { tuples, provenance })
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuple_len(&self) -> Option<usize> {
        self.tuples.first().map(DyadicTuple::len)
    }

    pub fn image(&self, g: &PlMap) -> BTreeSet<DyadicTuple> {
        self.tuples.iter().map(|t| t.map(g)).collect()
    }

    pub fn max_mesh(&self) -> Option<Dyadic> {
        self.tuples.iter().map(mesh).max()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FolnerConfig {
    pub placement: BlockPlacement,
    pub order: ActionOrder,
    /// Largest tuple set that may be materialised.
    pub tuple_budget: u128,
    /// Word budget handed to each orbit enumeration.
    pub word_budget: u128,
}

impl Default for FolnerConfig {
    fn default() -> Self {
        FolnerConfig {
            placement: BlockPlacement::Chained,
            order: ActionOrder::RightmostFirst,
            tuple_budget: 1_000_000,
            word_budget: DEFAULT_WORD_BUDGET,
        }
    }
}

/// Builds the families, caching the placed orbit blocks.
pub struct FolnerBuilder {
    config: FolnerConfig,
    blocks: HashMap<(usize, usize, usize), Vec<Vec<Dyadic>>>,
}

impl FolnerBuilder {
    pub fn new(config: FolnerConfig) -> Self {
        FolnerBuilder { config, blocks: HashMap::new() }
    }

    pub fn config(&self) -> &FolnerConfig {
        &self.config
    }

    /// Placed tuples of block `i` (1-based) built from `I_{n_i}^{k}`.
    fn block(&mut self, i: usize, n_i: usize, k: usize) -> Result<&[Vec<Dyadic>]> {
        let key = (i, n_i, k);
        if !self.blocks.contains_key(&key) {
            let orbit =
                enumerate_ink_with_budget(n_i, k, self.config.order, self.config.word_budget)?;
            let shift = match self.config.placement {
                BlockPlacement::Chained => -(i as i64 - 1),
                BlockPlacement::Literal => i as i64,
            };
            let placed = orbit
                .tuples
                .iter()
                .map(|t| {
                    t.coords().iter().map(|x| Generator::F1.apply_pow(shift, x)).collect()
                })
                .collect();
            self.blocks.insert(key, placed);
        }
        Ok(&self.blocks[&key])
    }

    fn check_budget(&self, what: String, needed: u128) -> Result<()> {
        if needed > self.config.tuple_budget {
            return Err(Error::BudgetExceeded { what, needed, budget: self.config.tuple_budget });
        }
        Ok(())
    }

    /// All tuples of `Y_{l, n_1..n_l}` as coordinate lists.
    fn y_tuples(&mut self, parts: &[usize]) -> Result<Vec<DyadicTuple>> {
        let l = parts.len();
        if l == 0 {
            return Err(Error::InvalidInput("Y needs l >= 1".into()));
        }
        let mut blocks = Vec::with_capacity(l);
        for (idx, &n_i) in parts.iter().enumerate() {
            let i = idx + 1;
            blocks.push(self.block(i, n_i, l - i)?.to_vec());
        }
        let needed = blocks.iter().map(|b| b.len() as u128).product::<u128>();
        self.check_budget(format!("Y_{l},{parts:?}"), needed)?;
        let mut acc: Vec<Vec<Dyadic>> = vec![Vec::new()];
        for b in &blocks {
            let mut next = Vec::with_capacity(acc.len() * b.len());
            for prefix in &acc {
                for block in b {
                    let mut t = prefix.clone();
                    t.extend(block.iter().cloned());
                    next.push(t);
                }
            }
            acc = next;
        }
        acc.into_iter()
            .map(|mut c| {
                c.sort();
                c.dedup();
                debug_assert_eq!(c.len(), l + parts.iter().sum::<usize>() + 1);
                DyadicTuple::new(c)
            })
            .collect()
    }

    pub fn build_y(&mut self, parts: &[usize]) -> Result<TupleSet> {
        let tuples = self.y_tuples(parts)?.into_iter().collect();
        let n = parts.iter().sum();
        TupleSet::new(tuples, Provenance { family: Family::Y, l: parts.len(), n, m: 0 })
    }

    fn union_over(&mut self, comps: Vec<Vec<usize>>, prov: Provenance) -> Result<TupleSet> {
        let mut sizes = 0u128;
        let mut all = BTreeSet::new();
        for parts in comps {
            let ts = self.y_tuples(&parts)?;
            sizes += ts.len() as u128;
            self.check_budget(format!("Y^{},{}", prov.l, prov.n), sizes)?;
            all.extend(ts);
        }
        TupleSet::new(all, prov)
    }

    /// `Y^{l,n}`, the union over compositions of `n` into `l` parts.
    pub fn build_yln(&mut self, l: usize, n: usize) -> Result<TupleSet> {
        let prov = Provenance { family: Family::Yln, l, n, m: 0 };
        self.union_over(compositions(n, l), prov)
    }

    /// `Y_0^{l,n}`: compositions with `n_1 = 0`.
    pub fn build_yln0(&mut self, l: usize, n: usize) -> Result<TupleSet> {
        let prov = Provenance { family: Family::Yln0, l, n, m: 0 };
        let comps = compositions(n, l).into_iter().filter(|c| c[0] == 0).collect();
        self.union_over(comps, prov)
    }

    /// `X^{0,l,n} = U_{i<=l} U_{j<l} f1^j(Y^{2l-i, n+i})`, refined `m` times by κ.
    pub fn build_x(&mut self, m: usize, l: usize, n: usize) -> Result<TupleSet> {
        if l == 0 {
            return Err(Error::InvalidInput("X needs l >= 1".into()));
        }
        if m > 4 {
            return Err(Error::InvalidInput("X is only built for m <= 4".into()));
        }
        let f1 = Generator::F1.map();
        let mut all = BTreeSet::new();
        for i in 0..=l {
            let y = self.build_yln(2 * l - i, n + i)?;
            let mut cur: Vec<DyadicTuple> = y.tuples.into_iter().collect();
            for _ in 0..l {
                self.check_budget(format!("X^0,{l},{n}"), (all.len() + cur.len()) as u128)?;
                let next: Vec<DyadicTuple> = cur.par_iter().map(|t| t.map(f1)).collect();
                all.extend(std::mem::replace(&mut cur, next));
            }
        }
        let mut tuples = all;
        for _ in 0..m {
            tuples = tuples.par_iter().map(kappa).collect::<Vec<_>>().into_iter().collect();
        }
        TupleSet::new(tuples, Provenance { family: Family::X, l, n, m })
    }

    /// Compares `g(Y^{l+1,n})` with `Y^{l,n+1} \ Y_0^{l,n+1}`; with `g = f2` this is
    /// the shift identity.
    pub fn shift_identity_audit_with(
        &mut self,
        l: usize,
        n: usize,
        g: &PlMap,
    ) -> Result<SetComparison> {
        let lhs = self.build_yln(l + 1, n)?.image(g);
        let y = self.build_yln(l, n + 1)?;
        let y0 = self.build_yln0(l, n + 1)?;
        let rhs: BTreeSet<_> = y.tuples.difference(&y0.tuples).cloned().collect();
        Ok(SetComparison::of(&lhs, &rhs))
    }

    pub fn shift_identity_audit(&mut self, l: usize, n: usize) -> Result<SetComparison> {
        self.shift_identity_audit_with(l, n, Generator::F2.map())
    }
}

impl Default for FolnerBuilder {
    fn default() -> Self {
        Self::new(FolnerConfig::default())
    }
}

/// Compositions of `n` into `l` nonnegative parts, in lexicographic order.
pub fn compositions(n: usize, l: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, l: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if l == 1 {
            cur.push(n);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in 0..=n {
            cur.push(a);
            go(n - a, l - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if l > 0 {
        go(n, l, &mut Vec::with_capacity(l), &mut out);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SetComparison {
    pub lhs_size: usize,
    pub rhs_size: usize,
    pub common: usize,
    pub symmetric_difference: usize,
}

impl SetComparison {
    pub fn of(a: &BTreeSet<DyadicTuple>, b: &BTreeSet<DyadicTuple>) -> Self {
        let common = a.intersection(b).count();
        SetComparison {
            lhs_size: a.len(),
            rhs_size: b.len(),
            common,
            symmetric_difference: a.len() + b.len() - 2 * common,
        }
    }

    pub fn equal(&self) -> bool {
        self.symmetric_difference == 0
    }
}

/// `(x_1/2, x_1, (x_1+x_2)/2, ..., x_{n-1}, (x_{n-1}+1)/2)`.
pub fn kappa(x: &DyadicTuple) -> DyadicTuple {
    let c = x.coords();
    let mut out = Vec::with_capacity(2 * c.len() + 1);
    let mut prev = Dyadic::zero();
    for xi in c {
        out.push(Dyadic::midpoint(&prev, xi));
        out.push(xi.clone());
        prev = xi.clone();
    }
    out.push(Dyadic::midpoint(&prev, &Dyadic::one()));
    DyadicTuple::new(out).expect("midpoints of an increasing tuple are increasing")
}

/// Whether every tuple contains `j / 2^m` for `1 <= j < 2^m`.
pub fn grid_containment(s: &TupleSet, m: u32) -> bool {
    let grid: Vec<Dyadic> = (1..(1i64 << m)).map(|j| Dyadic::new(j, m)).collect();
    s.tuples.par_iter().all(|t| grid.iter().all(|g| t.contains(g)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub generator: String,
    pub set_size: usize,
    pub intersection_size: usize,
    pub ratio: BigRational,
    pub paper_prediction: Option<BigRational>,
}

/// `|g(S) ∩ S| / |S|` by materialising `g(S)` and intersecting.
pub fn ratio_by_image(s: &TupleSet, g: &PlMap) -> usize {
    s.image(g).intersection(&s.tuples).count()
}

/// `#{x in S : g(x) in S}`; equals `|g(S) ∩ S|` because `g` is injective.
pub fn ratio_by_membership(s: &TupleSet, g: &PlMap) -> usize {
    let members: HashSet<&DyadicTuple> = s.tuples.iter().collect();
    s.tuples.par_iter().filter(|t| members.contains(&t.map(g))).count()
}

/// Both counting paths are run; disagreement is a hard error.
pub fn folner_ratio(s: &TupleSet, g: &PlMap, name: &str) -> Result<RatioReport> {
    if s.is_empty() {
        return Err(Error::InvalidInput("Følner ratio of an empty set".into()));
    }
    let a = ratio_by_image(s, g);
    let b = ratio_by_membership(s, g);
    if a != b {
        return Err(Error::Precondition(format!("ratio paths disagree: {a} vs {b}")));
    }
    let paper_prediction = (s.provenance.family == Family::X)
        .then(|| BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(s.provenance.l)));
    Ok(RatioReport {
        generator: name.to_string(),
        set_size: s.len(),
        intersection_size: a,
        ratio: BigRational::new(BigInt::from(a), BigInt::from(s.len())),
        paper_prediction,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquivarianceReport {
    pub checked: usize,
    pub failures: usize,
}

/// `g(κ(x)) = κ(g(x))` for every `x` in `S`. Errors if a breakpoint of `g` lies
/// strictly inside a gap of some tuple, where `g` is not affine on the gap.
pub fn kappa_equivariance_check(s: &TupleSet, g: &PlMap) -> Result<EquivarianceReport> {
    let breaks: Vec<&Dyadic> = g
        .domain_breaks()
        .filter(|b| !b.is_zero() && **b != Dyadic::one())
        .collect();
    let results: Vec<Result<bool>> = s
        .tuples
        .par_iter()
        .map(|t| {
            if let Some(b) = breaks.iter().find(|b| !t.contains(b)) {
                return Err(Error::Precondition(format!(
                    "breakpoint {b} lies inside a gap of {t}"
                )));
            }
            Ok(kappa(t).map(g) == kappa(&t.map(g)))
        })
        .collect();
    let mut failures = 0;
    for r in results {
        if !r? {
            failures += 1;
        }
    }
    Ok(EquivarianceReport { checked: s.len(), failures })
}

/// `1 - |Z'| / |S|` with `Z' = {x in S : g(x) in S, mesh(x) < eps}`.
pub fn condition_a_audit(s: &TupleSet, g: &PlMap, eps: &BigRational) -> Result<BigRational> {
    if s.is_empty() {
        return Err(Error::InvalidInput("condition (a) audit of an empty set".into()));
    }
    let members: HashSet<&DyadicTuple> = s.tuples.iter().collect();
    let good = s
        .tuples
        .par_iter()
        .filter(|t| mesh(t).to_ratio() < *eps && members.contains(&t.map(g)))
        .count();
    Ok(BigRational::one() - BigRational::new(BigInt::from(good), BigInt::from(s.len())))
}

/// Rows of `folner_audit.csv` for every `m <= m_max` and `(l, n)` pair.
pub fn folner_audit(
    builder: &mut FolnerBuilder,
    pairs: &[(usize, usize)],
    m_max: usize,
) -> Result<Table> {
    let mut out = Table::new(
        "folner_audit",
        &[
            "m", "l", "n", "set_size", "generator", "intersection_size", "ratio_num", "ratio_den",
            "paper_prediction", "mesh_max",
        ],
    );
    for &(l, n) in pairs {
        for m in 0..=m_max {
            let x = builder.build_x(m, l, n)?;
            let mesh_max = x.max_mesh().map(|d| fmt_f64(d.to_f64())).unwrap_or_default();
            for g in [Generator::F1, Generator::F2] {
                let r = folner_ratio(&x, g.map(), g.name())?;
                out.push([
                    cell(m),
                    cell(l),
                    cell(n),
                    cell(r.set_size),
                    r.generator.clone(),
                    cell(r.intersection_size),
                    cell(r.ratio.numer()),
                    cell(r.ratio.denom()),
                    r.paper_prediction.map(|p| p.to_string()).unwrap_or_default(),
                    mesh_max.clone(),
                ]);
            }
        }
    }
    Ok(out)
}

/// The standard points `r_0 < ... < r_l`.
pub fn standard_points(l: usize) -> Vec<Dyadic> {
    (0..=l as i64).map(standard_point).collect()
}
