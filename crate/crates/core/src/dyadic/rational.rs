use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::scalar::Real;

/// Exact binary rational `numerator / 2^exponent`.
///
/// Always canonical: the numerator is odd, or zero with exponent zero. Structural
/// equality therefore coincides with equality of values.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u32) -> Self {
        Self::normalized(num.into(), exp)
    }

    fn normalized(mut num: BigInt, mut exp: u32) -> Self {
        if num.is_zero() {
            return Self { num, exp: 0 };
        }
        if exp > 0 {
            let tz = num.trailing_zeros().unwrap_or(0).min(exp as u64) as u32;
            if tz > 0 {
                num >>= tz;
                exp -= tz;
            }
        }
        Self { num, exp }
    }

    pub fn zero() -> Self {
        Self { num: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Self { num: BigInt::one(), exp: 0 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(n, 0)
    }

    /// `2^k` for any integer `k`.
    pub fn pow2(k: i64) -> Self {
        if k >= 0 {
            Self { num: BigInt::one() << k as usize, exp: 0 }
        } else {
            Self { num: BigInt::one(), exp: (-k) as u32 }
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    /// Multiply by `2^k`.
    pub fn scale_pow2(&self, k: i64) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        if k >= 0 {
            let k = k as u64;
            if (self.exp as u64) >= k {
                Self { num: self.num.clone(), exp: self.exp - k as u32 }
            } else {
                Self { num: &self.num << (k - self.exp as u64) as usize, exp: 0 }
            }
        } else {
            Self { num: self.num.clone(), exp: self.exp + (-k) as u32 }
        }
    }

    pub fn half(&self) -> Self {
        self.scale_pow2(-1)
    }

    /// Midpoint `(a + b) / 2`.
    pub fn midpoint(a: &Self, b: &Self) -> Self {
        (a + b).half()
    }

    /// `log2` of the value if it is a positive power of two.
    pub fn log2_exact(&self) -> Option<i64> {
        if self.num.is_one() {
            Some(-(self.exp as i64))
        } else if self.exp == 0 && self.num.is_positive() {
            let tz = self.num.trailing_zeros()?;
            (self.num == (BigInt::one() << tz as usize)).then_some(tz as i64)
        } else {
            None
        }
    }

    pub fn to_real<T: Real>(&self) -> T {
        // Split off the exponent so huge numerators do not overflow before scaling.
        let bits = self.num.bits();
        if bits <= 1000 {
            let n = self.num.to_f64().unwrap_or(f64::NAN);
            T::lit(n) * T::lit(2.0).powi(-(self.exp.min(i32::MAX as u32) as i32))
        } else {
            let shift = bits - 64;
            let top = (&self.num >> shift as usize).to_f64().unwrap_or(f64::NAN);
            T::lit(top) * T::lit(2.0).powi(shift as i32 - self.exp as i32)
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_real::<f64>()
    }

    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::one() << self.exp as usize)
    }

    /// Canonical odd-numerator form `k / 2^p` with `k` odd; `None` for integers.
    pub fn odd_form(&self) -> Option<(BigInt, u32)> {
        (self.exp > 0).then(|| (self.num.clone(), self.exp))
    }

    /// True if the numerator is odd (or the value is an integer).
    pub fn is_canonical_odd(&self) -> bool {
        self.exp == 0 || self.num.is_odd()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => self.num.cmp(&other.num),
            Ordering::Less => {
                let lhs = &self.num << (other.exp - self.exp) as usize;
                lhs.cmp(&other.num)
            }
            Ordering::Greater => {
                let rhs = &other.num << (self.exp - other.exp) as usize;
                self.num.cmp(&rhs)
            }
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn aligned(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, u32) {
    let e = a.exp.max(b.exp);
    let an = if a.exp == e { a.num.clone() } else { &a.num << (e - a.exp) as usize };
    let bn = if b.exp == e { b.num.clone() } else { &b.num << (e - b.exp) as usize };
    (an, bn, e)
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = aligned(self, rhs);
        Dyadic::normalized(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = aligned(self, rhs);
        Dyadic::normalized(a - b, e)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::normalized(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -&self.num, exp: self.exp }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic { (&self).$m(&rhs) }
        }
        impl $tr<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: &Dyadic) -> Dyadic { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

/// Renders as `num/2^exp`, the canonical report format.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

/// Accepts `num/2^exp`, `num/den` with `den` a power of two, or an integer.
impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a dyadic rational: {s:?}"));
        match s.split_once('/') {
            None => Ok(Dyadic::new(s.parse::<BigInt>().map_err(|_| bad())?, 0)),
            Some((n, d)) => {
                let num: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d = d.trim();
                let exp = if let Some(e) = d.strip_prefix("2^") {
                    e.parse::<u32>().map_err(|_| bad())?
                } else {
                    let den: BigInt = d.parse().map_err(|_| bad())?;
                    let den = Dyadic::new(den, 0);
                    match den.log2_exact() {
                        Some(k) if k >= 0 => k as u32,
                        _ => return Err(bad()),
                    }
                };
                Ok(Dyadic::new(num, exp))
            }
        }
    }
}
