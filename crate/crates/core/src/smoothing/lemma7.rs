//! The sets `Z ⊂ D_N` and `Z_i ⊂ Z`, held symbolically.
//!
//! An element is a tuple `t̄ ∈ X^{m,l,n}` together with `2k` iterate indices. It
//! realises to `k(2p+1) − 1` coordinates: a head block in chart `0`, one block
//! `x'_r, φ_r(ψ^{j}(−i/4p)), x_r, φ_r(ψ^{j'}(i/4p)), x''_r` per coordinate `r` of
//! `t̄`, and a tail block `3/4, 1 + ψ^{j}(−i/4p)` in chart `1`.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;

use super::generators::{phi, phi_with_deriv, SmoothGenerator, Which};
use super::lemma6::{lemma6_exponent, Side};
use super::psi::PsiModel;
use crate::dyadic::{Dyadic, DyadicTuple, Generator};
use crate::error::{invalid, Result};
use crate::folner::{FolnerBuilder, TupleSet};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ZParams {
    pub m: usize,
    pub l: usize,
    pub n: usize,
    /// iterate bound `J`
    pub j_max: u32,
    pub p: u32,
}

impl Default for ZParams {
    fn default() -> Self {
        ZParams { m: 1, l: 2, n: 0, j_max: 3, p: 2 }
    }
}

/// Which tuples of `X` enter `Z_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum XPart {
    /// `X ∩ f_i^{-1}(X)`: the tuples whose image stays in `X`.
    Preimage,
    /// `f_i(X) ∩ X` as printed.
    PrintedImage,
}

/// Range of the last index `j_{2k}` in `Z_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LastIndex {
    /// `1 <= j_{2k} <= J − 1` like every other index.
    Restricted,
    /// `0 <= j_{2k} <= J` as printed.
    Printed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ZiVariant {
    pub x_part: XPart,
    pub last: LastIndex,
}

impl ZiVariant {
    pub const DEFAULT: ZiVariant = ZiVariant { x_part: XPart::Preimage, last: LastIndex::Restricted };
    pub const PRINTED: ZiVariant = ZiVariant { x_part: XPart::PrintedImage, last: LastIndex::Printed };

    pub fn label(&self) -> &'static str {
        match (self.x_part, self.last) {
            (XPart::Preimage, LastIndex::Restricted) => "preimage/restricted",
            (XPart::Preimage, LastIndex::Printed) => "preimage/printed-last",
            (XPart::PrintedImage, LastIndex::Restricted) => "image/restricted",
            (XPart::PrintedImage, LastIndex::Printed) => "image/printed-last",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZElement {
    pub t: DyadicTuple,
    /// `j_1, ..., j_{2k}`; may leave `[0, J]` after a symbolic image.
    pub js: Vec<i64>,
}

pub struct SymbolicZ<T: Real> {
    pub params: ZParams,
    /// `2^m (n + 2l + 2)`
    pub k: usize,
    x: TupleSet,
    x_list: Vec<DyadicTuple>,
    w: BTreeSet<Dyadic>,
    psi: Arc<PsiModel<T>>,
}

fn f_map(which: Which) -> &'static crate::dyadic::PlMap {
    match which {
        Which::G1 => Generator::F1.map(),
        Which::G2 => Generator::F2.map(),
    }
}

impl<T: Real> SymbolicZ<T> {
    pub fn build(params: ZParams, builder: &mut FolnerBuilder, psi: Arc<PsiModel<T>>) -> Result<Self> {
        if params.j_max < 2 || params.p < 1 {
            return Err(invalid("Z needs J >= 2 and p >= 1"));
        }
        let x = builder.build_x(params.m, params.l, params.n)?;
        if x.is_empty() {
            return Err(invalid("X set is empty"));
        }
        let k = (1usize << params.m) * (params.n + 2 * params.l + 2);
        debug_assert_eq!(x.tuple_len(), Some(k - 1));
        let x_list: Vec<DyadicTuple> = x.tuples.iter().cloned().collect();
        let w = x_list.iter().flat_map(|t| t.coords().iter().cloned()).collect();
        Ok(SymbolicZ { params, k, x, x_list, w, psi })
    }

    pub fn x(&self) -> &TupleSet {
        &self.x
    }

    /// Distinct chart points `W`.
    pub fn w(&self) -> &BTreeSet<Dyadic> {
        &self.w
    }

    pub fn coordinate_count(&self) -> usize {
        self.k * (2 * self.params.p as usize + 1) - 1
    }

    pub fn index_count(&self) -> usize {
        2 * self.k
    }

    pub fn contains(&self, z: &ZElement) -> bool {
        z.js.len() == self.index_count()
            && z.js.iter().all(|j| (0..=self.params.j_max as i64).contains(j))
            && self.x.tuples.contains(&z.t)
    }

    /// `(J+1)^{2k} |X|`, assuming distinct symbols realise distinct tuples.
    pub fn cardinality(&self) -> BigUint {
        BigUint::from(self.params.j_max + 1).pow(self.index_count() as u32) * BigUint::from(self.x.len())
    }

    pub fn x_part(&self, which: Which, part: XPart) -> Vec<DyadicTuple> {
        let f = f_map(which);
        match part {
            XPart::Preimage => {
                self.x_list.iter().filter(|t| self.x.tuples.contains(&t.map(f))).cloned().collect()
            }
            XPart::PrintedImage => {
                let img: BTreeSet<DyadicTuple> = self.x_list.iter().map(|t| t.map(f)).collect();
                img.intersection(&self.x.tuples).cloned().collect()
            }
        }
    }

    /// Inclusive index ranges defining `Z_i`.
    fn zi_ranges(&self, last: LastIndex) -> Vec<(i64, i64)> {
        let j = self.params.j_max as i64;
        let mut r = vec![(1, j - 1); self.index_count()];
        if last == LastIndex::Printed {
            *r.last_mut().unwrap() = (0, j);
        }
        r
    }

    pub fn zi_cardinality(&self, which: Which, v: ZiVariant) -> BigUint {
        let per: BigUint =
            self.zi_ranges(v.last).iter().map(|(a, b)| BigUint::from((b - a + 1) as u64)).product();
        per * BigUint::from(self.x_part(which, v.x_part).len())
    }

    /// `|Z_i| / |Z|`.
    pub fn zi_fraction(&self, which: Which, v: ZiVariant) -> BigRational {
        BigRational::new(self.zi_cardinality(which, v).into(), self.cardinality().into())
    }

    /// Index shift of each of the `2k` blocks under `g`.
    pub fn block_exponents(&self, which: Which, t: &DyadicTuple) -> Result<Vec<i64>> {
        let mut e = Vec::with_capacity(self.index_count());
        e.push(match which {
            Which::G1 => -1,
            Which::G2 => 0,
        });
        for r in t.coords() {
            e.push(lemma6_exponent(r, which, Side::Minus)? as i64);
            e.push(lemma6_exponent(r, which, Side::Plus)? as i64);
        }
        e.push(1);
        Ok(e)
    }

    /// The symbolic image `g(z)`: chart points move by `f`, indices by the exponents.
    pub fn image(&self, which: Which, z: &ZElement) -> Result<ZElement> {
        let e = self.block_exponents(which, &z.t)?;
        Ok(ZElement { t: z.t.map(f_map(which)), js: z.js.iter().zip(e).map(|(j, e)| j + e).collect() })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> ZElement {
        let t = self.x_list[rng.random_range(0..self.x_list.len())].clone();
        let js = (0..self.index_count()).map(|_| rng.random_range(0..=self.params.j_max as i64)).collect();
        ZElement { t, js }
    }

    /// Uniform element of `Z_i`; `None` if `Z_i` is empty.
    pub fn sample_zi<R: Rng>(&self, which: Which, v: ZiVariant, rng: &mut R) -> Option<ZElement> {
        let part = self.x_part(which, v.x_part);
        if part.is_empty() {
            return None;
        }
        let t = part[rng.random_range(0..part.len())].clone();
        let js = self.zi_ranges(v.last).iter().map(|&(a, b)| rng.random_range(a..=b)).collect();
        Some(ZElement { t, js })
    }

    /// Exhaustive check of `g_i(Z_i) ⊆ Z` over the `X` part, blockwise.
    pub fn inclusion_audit(&self, which: Which, v: ZiVariant) -> Result<InclusionReport> {
        let part = self.x_part(which, v.x_part);
        let ranges = self.zi_ranges(v.last);
        let j = self.params.j_max as i64;
        let f = f_map(which);
        let mut rep = InclusionReport { x_part_size: part.len(), x_failures: 0, index_failures: 0 };
        for t in &part {
            if !self.x.tuples.contains(&t.map(f)) {
                rep.x_failures += 1;
            }
            let e = self.block_exponents(which, t)?;
            if ranges.iter().zip(&e).any(|(&(a, b), e)| a + e < 0 || b + e > j) {
                rep.index_failures += 1;
            }
        }
        Ok(rep)
    }

    /// Numeric coordinates of `z`; indices must be non-negative.
    pub fn realize(&self, z: &ZElement) -> Result<Vec<T>> {
        if z.js.len() != self.index_count() || z.js.iter().any(|j| *j < 0) {
            return Err(invalid("malformed Z element"));
        }
        let psi = &*self.psi;
        let p = self.params.p as usize;
        let step = |i: usize| T::from_usize_lossy(i) / T::from_usize_lossy(4 * p);
        let quarter = T::lit(0.25);
        let mut out = Vec::with_capacity(self.coordinate_count());
        let jf = |i: usize| z.js[i] as i32;
        for i in 1..p {
            out.push(psi.iter(jf(0), step(i)));
        }
        out.push(quarter);
        for (s, r) in z.t.coords().iter().enumerate() {
            out.push(phi(psi, r, -quarter)?);
            for i in (1..p).rev() {
                out.push(phi(psi, r, psi.iter(jf(2 * s + 1), -step(i)))?);
            }
            out.push(phi(psi, r, T::zero())?);
            for i in 1..p {
                out.push(phi(psi, r, psi.iter(jf(2 * s + 2), step(i)))?);
            }
            out.push(phi(psi, r, quarter)?);
        }
        out.push(T::lit(0.75));
        let last = self.index_count() - 1;
        for i in (1..p).rev() {
            out.push(T::one() + psi.iter(jf(last), -step(i)));
        }
        debug_assert_eq!(out.len(), self.coordinate_count());
        Ok(out)
    }

    /// Index ranges `(start, end)` of the coordinates forming each chart block,
    /// endpoints 0 and 1 included as positions `-1` and `len`.
    fn block_spans(&self) -> Vec<(isize, isize)> {
        let p = self.params.p as isize;
        let mut spans = vec![(-1, p - 1)];
        let mut at = p;
        for _ in 0..self.k - 1 {
            spans.push((at, at + 2 * p));
            at += 2 * p + 1;
        }
        spans.push((at, at + p));
        spans
    }

    /// `(in-block mesh, full mesh)` of a realised element.
    pub fn meshes(&self, coords: &[T]) -> (f64, f64) {
        let at = |i: isize| -> f64 {
            if i < 0 {
                0.0
            } else if i as usize >= coords.len() {
                1.0
            } else {
                coords[i as usize].as_f64()
            }
        };
        let mut inner = 0.0f64;
        for (a, b) in self.block_spans() {
            for i in a..b {
                inner = inner.max(at(i + 1) - at(i));
            }
        }
        let mut full = 0.0f64;
        for i in -1..coords.len() as isize {
            full = full.max(at(i + 1) - at(i));
        }
        (inner, full)
    }

    /// `C = max_{0<=j<=J} max_{|x|<=1/4} (max_{r∈W} |(φ_r∘ψ^j)'(x)| + |(ψ^j)'(x)|)`
    /// on a grid of `grid + 1` points.
    pub fn constant_c(&self, grid: usize) -> Result<f64> {
        let psi = &*self.psi;
        let w: Vec<&Dyadic> = self.w.iter().collect();
        let pts: Vec<(u32, usize)> =
            (0..=self.params.j_max).flat_map(|j| (0..=grid).map(move |i| (j, i))).collect();
        let vals: Result<Vec<f64>> = pts
            .par_iter()
            .map(|&(j, i)| {
                let x = T::lit(-0.25) + T::lit(0.5) * T::from_usize_lossy(i) / T::from_usize_lossy(grid);
                let (y, dy) = psi.iter_with_deriv(j as i32, x);
                let mut best = T::zero();
                for r in &w {
                    let (_, dphi) = phi_with_deriv(psi, r, y)?;
                    best = best.max((dphi * dy).abs());
                }
                Ok((best + dy.abs()).as_f64())
            })
            .collect();
        Ok(vals?.into_iter().fold(0.0, f64::max))
    }

    /// Distinct symbols realising to tuples within `tol` in sup norm.
    pub fn distinctness_violations(&self, elems: &[ZElement], tol: f64) -> Result<usize> {
        let uniq: Vec<&ZElement> = elems.iter().collect::<BTreeSet<_>>().into_iter().collect();
        let mut real: Vec<(Vec<f64>, usize)> = Vec::with_capacity(uniq.len());
        for (i, z) in uniq.iter().enumerate() {
            real.push((self.realize(z)?.into_iter().map(|v| v.as_f64()).collect(), i));
        }
        real.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite coordinates"));
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol);
        Ok(real.windows(2).filter(|w| close(&w[0].0, &w[1].0)).count())
    }

    /// `max |g(realize(z)) − realize(image(z))|` over the given elements.
    pub fn image_spot_check(&self, g: &SmoothGenerator<T>, elems: &[ZElement]) -> Result<f64> {
        let mut worst = 0.0f64;
        for z in elems {
            let img = self.image(g.which, z)?;
            let lhs: Vec<T> = self.realize(z)?.into_iter().map(|x| g.eval(x)).collect();
            let rhs = self.realize(&img)?;
            for (a, b) in lhs.iter().zip(&rhs) {
                worst = worst.max((*a - *b).abs().as_f64());
            }
        }
        Ok(worst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InclusionReport {
    pub x_part_size: usize,
    /// tuples of the `X` part whose image leaves `X`
    pub x_failures: usize,
    /// tuples for which some index range is pushed out of `[0, J]`
    pub index_failures: usize,
}

impl InclusionReport {
    pub fn passes(&self) -> bool {
        self.x_failures == 0 && self.index_failures == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::LazyLock;

    static PSI: LazyLock<Arc<PsiModel<f64>>> =
        LazyLock::new(|| Arc::new(PsiModel::build(1 << 12, 1e-14).unwrap()));

    fn z(params: ZParams) -> SymbolicZ<f64> {
        SymbolicZ::build(params, &mut FolnerBuilder::default(), PSI.clone()).unwrap()
    }

    #[test]
    fn coordinate_count_on_samples() {
        let zs = z(ZParams::default());
        assert_eq!(zs.k, 12);
        assert_eq!(zs.coordinate_count(), 12 * 5 - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let e = zs.sample(&mut rng);
            assert!(zs.contains(&e));
            let c = zs.realize(&e).unwrap();
            assert_eq!(c.len(), zs.coordinate_count());
            assert!(c.windows(2).all(|w| w[0] < w[1]));
            assert!(c[0] > 0.0 && *c.last().unwrap() < 1.0);
        }
    }

    #[test]
    fn cardinalities() {
        let zs = z(ZParams { m: 0, l: 2, n: 0, j_max: 3, p: 2 });
        let k = zs.k as u32;
        assert_eq!(zs.cardinality(), BigUint::from(4u32).pow(2 * k) * BigUint::from(zs.x().len()));
        let part = zs.x_part(Which::G1, XPart::Preimage).len();
        assert_eq!(zs.zi_cardinality(Which::G1, ZiVariant::DEFAULT), BigUint::from(2u32).pow(2 * k) * part);
        let printed = zs.x_part(Which::G1, XPart::PrintedImage).len();
        assert_eq!(printed, part);
        assert_eq!(
            zs.zi_cardinality(Which::G1, ZiVariant::PRINTED),
            BigUint::from(2u32).pow(2 * k - 1) * BigUint::from(4u32) * printed
        );
    }

    #[test]
    fn inclusion_default_passes_printed_fails() {
        let zs = z(ZParams::default());
        for w in [Which::G1, Which::G2] {
            let r = zs.inclusion_audit(w, ZiVariant::DEFAULT).unwrap();
            assert!(r.passes(), "{w:?} {r:?}");
            assert!(r.x_part_size > 0);
            let p = zs.inclusion_audit(w, ZiVariant::PRINTED).unwrap();
            assert!(!p.passes(), "{w:?} {p:?}");
            assert_eq!(p.index_failures, p.x_part_size);
        }
    }

    #[test]
    fn symbolic_image_matches_numeric() {
        let zs = z(ZParams::default());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for w in [Which::G1, Which::G2] {
            let g = SmoothGenerator::new(PSI.clone(), w);
            let elems: Vec<_> =
                (0..30).map(|_| zs.sample_zi(w, ZiVariant::DEFAULT, &mut rng).unwrap()).collect();
            for e in &elems {
                assert!(zs.contains(&zs.image(w, e).unwrap()));
            }
            let err = zs.image_spot_check(&g, &elems).unwrap();
            assert!(err < 1e-9, "{w:?} {err}");
        }
    }

    #[test]
    fn mesh_bound() {
        let zs = z(ZParams::default());
        let c = zs.constant_c(200).unwrap();
        assert!(c > 1.0);
        let bound = c / (4.0 * zs.params.p as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let coords = zs.realize(&zs.sample(&mut rng)).unwrap();
            let (inner, full) = zs.meshes(&coords);
            assert!(inner <= bound, "{inner} > {bound}");
            assert!(full >= inner);
        }
    }

    #[test]
    fn distinct_realisations() {
        let zs = z(ZParams::default());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let elems: Vec<_> = (0..300).map(|_| zs.sample(&mut rng)).collect();
        assert_eq!(zs.distinctness_violations(&elems, 1e-10).unwrap(), 0);
        let dup = vec![elems[0].clone(), elems[0].clone()];
        assert_eq!(zs.distinctness_violations(&dup, 1e-10).unwrap(), 0);
    }

    #[test]
    fn rejects_bad_params() {
        let p = ZParams { j_max: 1, ..ZParams::default() };
        assert!(SymbolicZ::build(p, &mut FolnerBuilder::default(), PSI.clone()).is_err());
    }
}
