use std::fmt;
use std::sync::LazyLock;

use super::{Dyadic, DyadicTuple, PlMap};

static F1: LazyLock<PlMap> = LazyLock::new(|| {
    let d = |s: &str| s.parse::<Dyadic>().unwrap();
    PlMap::from_breakpoints(vec![
        (d("0"), d("0")),
        (d("1/2"), d("1/4")),
        (d("3/4"), d("1/2")),
        (d("1"), d("1")),
    ])
    .unwrap()
});

static F2: LazyLock<PlMap> = LazyLock::new(|| {
    let d = |s: &str| s.parse::<Dyadic>().unwrap();
    PlMap::from_breakpoints(vec![
        (d("0"), d("0")),
        (d("1/2"), d("1/2")),
        (d("3/4"), d("5/8")),
        (d("7/8"), d("3/4")),
        (d("1"), d("1")),
    ])
    .unwrap()
});

static F1_INV: LazyLock<PlMap> = LazyLock::new(|| F1.inverse());
static F2_INV: LazyLock<PlMap> = LazyLock::new(|| F2.inverse());

/// The two standard generators of F.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Generator {
    F1,
    F2,
}

impl Generator {
    pub fn map(self) -> &'static PlMap {
        match self {
            Generator::F1 => &F1,
            Generator::F2 => &F2,
        }
    }

    pub fn inverse_map(self) -> &'static PlMap {
        match self {
            Generator::F1 => &F1_INV,
            Generator::F2 => &F2_INV,
        }
    }

    /// Apply `self^power` to a point.
    pub fn apply_pow(self, power: i64, x: &Dyadic) -> Dyadic {
        let m = if power < 0 { self.inverse_map() } else { self.map() };
        let mut y = x.clone();
        for _ in 0..power.unsigned_abs() {
            y = m.eval(&y);
        }
        y
    }

    pub fn name(self) -> &'static str {
        match self {
            Generator::F1 => "f1",
            Generator::F2 => "f2",
        }
    }
}

/// Order in which the letters of a word act on a point.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub enum ActionOrder {
    /// Function composition: the rightmost letter acts first.
    #[default]
    RightmostFirst,
    /// The leftmost letter acts first.
    LeftmostFirst,
}

/// Reduced word in `f1^±1, f2^±1`, stored as syllables `(generator, exponent)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GroupWord {
    letters: Vec<(Generator, i64)>,
}

impl GroupWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_syllables(syllables: impl IntoIterator<Item = (Generator, i64)>) -> Self {
        let mut w = Self::empty();
        for (g, e) in syllables {
            w.push(g, e);
        }
        w
    }

    /// Append `g^e` on the right, merging with the last syllable when possible.
    pub fn push(&mut self, g: Generator, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.letters.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.letters.pop();
                }
                return;
            }
        }
        self.letters.push((g, e));
    }

    pub fn syllables(&self) -> &[(Generator, i64)] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of letters `f^±1`.
    pub fn len(&self) -> usize {
        self.letters.iter().map(|(_, e)| e.unsigned_abs() as usize).sum()
    }

    /// Concatenation `self · other` (as a product, `other` acts first).
    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut w = self.clone();
        for &(g, e) in &other.letters {
            w.push(g, e);
        }
        w
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord::from_syllables(self.letters.iter().rev().map(|&(g, e)| (g, -e)))
    }

    /// The element of F this word denotes (composition order).
    pub fn to_map(&self) -> PlMap {
        self.letters
            .iter()
            .fold(PlMap::identity(), |acc, &(g, e)| acc.compose(&g.map().pow(e)))
    }

    pub fn apply_point(&self, x: &Dyadic, order: ActionOrder) -> Dyadic {
        let step = |y: Dyadic, &(g, e): &(Generator, i64)| g.apply_pow(e, &y);
        match order {
            ActionOrder::RightmostFirst => self.letters.iter().rev().fold(x.clone(), step),
            ActionOrder::LeftmostFirst => self.letters.iter().fold(x.clone(), step),
        }
    }

    /// Coordinatewise action on a partition tuple.
    pub fn apply(&self, tuple: &DyadicTuple, order: ActionOrder) -> DyadicTuple {
        DyadicTuple::from_sorted_unchecked(
            tuple.coords().iter().map(|x| self.apply_point(x, order)).collect(),
        )
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&(g, e)| if e == 1 { g.name().to_string() } else { format!("{}^{}", g.name(), e) })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}
