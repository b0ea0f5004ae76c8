//! Separation of log-derivatives between distinct short words in `g1, g2`.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::generators::{SmoothGenerator, Which};
use super::psi::PsiModel;
use crate::dyadic::{Generator, GroupWord, PlMap};
use crate::report::{fmt_f64, Table};
use crate::scalar::Real;

/// Letters `(generator, inverse?)`, acting rightmost first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SmoothWord(pub Vec<(Which, bool)>);

impl SmoothWord {
    pub fn identity() -> Self {
        SmoothWord(Vec::new())
    }

    /// The element of F this word corresponds to under `g_i ↦ f_i`.
    pub fn to_pl(&self) -> PlMap {
        GroupWord::from_syllables(self.0.iter().map(|&(w, inv)| {
            let g = match w {
                Which::G1 => Generator::F1,
                Which::G2 => Generator::F2,
            };
            (g, if inv { -1 } else { 1 })
        }))
        .to_map()
    }
}

impl fmt::Display for SmoothWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        let parts: Vec<String> =
            self.0.iter().map(|(w, inv)| format!("{}{}", w.name(), if *inv { "^-1" } else { "" })).collect();
        f.write_str(&parts.join(" "))
    }
}

/// The four generators `g1, g1^-1, g2, g2^-1`.
pub struct GeneratorSet<T: Real> {
    gens: [SmoothGenerator<T>; 4],
}

impl<T: Real> GeneratorSet<T> {
    pub fn new(psi: Arc<PsiModel<T>>) -> Self {
        let g1 = SmoothGenerator::new(psi.clone(), Which::G1);
        let g2 = SmoothGenerator::new(psi, Which::G2);
        GeneratorSet { gens: [g1.inverted(), g2.inverted(), g1, g2] }
    }

    pub fn get(&self, which: Which, inverse: bool) -> &SmoothGenerator<T> {
        let i = match which {
            Which::G1 => 0,
            Which::G2 => 1,
        };
        &self.gens[if inverse { i } else { i + 2 }]
    }

    /// `(w(t), ln w'(t))`.
    pub fn eval_log_deriv(&self, w: &SmoothWord, t: T) -> (T, T) {
        let mut x = t;
        let mut acc = T::zero();
        for &(which, inv) in w.0.iter().rev() {
            let (y, d) = self.get(which, inv).eval_with_deriv(x);
            acc = acc + d.ln();
            x = y;
        }
        (x, acc)
    }
}

/// Reduced words of length `<= max_len`, one per element of F.
pub fn distinct_words(max_len: usize) -> Vec<SmoothWord> {
    let letters = [(Which::G1, false), (Which::G1, true), (Which::G2, false), (Which::G2, true)];
    let mut level = vec![SmoothWord::identity()];
    let mut out = vec![SmoothWord::identity()];
    let mut seen: HashSet<PlMap> = HashSet::from([PlMap::identity()]);
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &level {
            for &(g, inv) in &letters {
                if w.0.first() == Some(&(g, !inv)) {
                    continue;
                }
                let mut v = vec![(g, inv)];
                v.extend(w.0.iter().cloned());
                let word = SmoothWord(v);
                if seen.insert(word.to_pl()) {
                    out.push(word.clone());
                }
                next.push(word);
            }
        }
        level = next;
    }
    out
}

fn grid_points<T: Real>(grid: usize) -> Vec<T> {
    (0..=grid).map(|i| T::from_usize_lossy(i) / T::from_usize_lossy(grid)).collect()
}

/// `sup_t |ln a'(t) − ln b'(t)|` on `grid + 1` points of `[0, 1]`.
pub fn condition_b_distance<T: Real>(gens: &GeneratorSet<T>, a: &SmoothWord, b: &SmoothWord, grid: usize) -> f64 {
    grid_points::<T>(grid)
        .into_iter()
        .map(|t| (gens.eval_log_deriv(a, t).1 - gens.eval_log_deriv(b, t).1).abs().as_f64())
        .fold(0.0, f64::max)
}

/// All pairwise distances among distinct words of length `<= max_len`, and their minimum.
pub fn condition_b_audit<T: Real>(gens: &GeneratorSet<T>, max_len: usize, grid: usize) -> (Table, f64) {
    let words = distinct_words(max_len);
    let pts = grid_points::<T>(grid);
    let profiles: Vec<Vec<T>> = words
        .par_iter()
        .map(|w| pts.iter().map(|&t| gens.eval_log_deriv(w, t).1).collect())
        .collect();
    let mut table = Table::new("conditionB", &["word_a", "word_b", "distance"]);
    let mut min = f64::INFINITY;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let d = profiles[i]
                .iter()
                .zip(&profiles[j])
                .map(|(a, b)| (*a - *b).abs().as_f64())
                .fold(0.0, f64::max);
            min = min.min(d);
            table.push([words[i].to_string(), words[j].to_string(), fmt_f64(d)]);
        }
    }
    (table, min)
}
