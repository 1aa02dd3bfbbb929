//! Number modes and the combinatorial primitives shared by every model.
//!
//! All computations are generic over [`Scalar`], which has exactly two
//! implementations: [`Exact`] (arbitrary-precision rationals) and `f64`.
//! The scalar type *is* the number mode, so a caller always states the mode
//! explicitly at the call site, e.g. `expected_distance::<Exact>(..)`.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational used by the exact number mode.
pub type Exact = BigRational;

/// Runtime selector for the two number modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NumberMode {
    Exact,
    #[default]
    Float,
}

impl fmt::Display for NumberMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumberMode::Exact => f.write_str("exact"),
            NumberMode::Float => f.write_str("float"),
        }
    }
}

impl FromStr for NumberMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(NumberMode::Exact),
            "float" => Ok(NumberMode::Float),
            _ => Err(Error::ParseMode(s.to_string())),
        }
    }
}

/// Arithmetic required by the models.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    /// Hashable, totally ordered stand-in used to group equal probabilities.
    type Key: Clone + fmt::Debug + Eq + Ord + Hash + Send + Sync;

    const MODE: NumberMode;

    fn from_u64(n: u64) -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn to_f64(&self) -> f64;

    /// `C(n, k)`, zero when `k > n`.
    fn binomial(n: u64, k: u64) -> Self;

    /// `C(a, b) / C(n, k)` without materializing either coefficient in float mode.
    fn binomial_ratio(a: u64, b: u64, n: u64, k: u64) -> Self;

    /// Exact modes return the value itself; float mode quantizes to 1e-9.
    fn key(&self) -> Self::Key;

    /// Equality in exact mode, relative/absolute tolerance 1e-9 in float mode.
    fn approx_eq(&self, other: &Self) -> bool;

    fn from_ratio(num: u64, den: u64) -> Self {
        Self::from_u64(num) / Self::from_u64(den)
    }

    fn powu(&self, exp: u64) -> Self {
        num::traits::pow(self.clone(), exp as usize)
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for BigRational {
    type Key = BigRational;

    const MODE: NumberMode = NumberMode::Exact;

    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn binomial(n: u64, k: u64) -> Self {
        BigRational::from_integer(BigInt::from(binomial_exact(n, k)))
    }

    fn binomial_ratio(a: u64, b: u64, n: u64, k: u64) -> Self {
        debug_assert!(k <= n, "C({n}, {k}) is zero");
        BigRational::new(
            BigInt::from(binomial_exact(a, b)),
            BigInt::from(binomial_exact(n, k)),
        )
    }

    fn key(&self) -> Self::Key {
        self.clone()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
}

const FLOAT_KEY_QUANTUM: f64 = 1e-9;

impl Scalar for f64 {
    type Key = i64;

    const MODE: NumberMode = NumberMode::Float;

    fn from_u64(n: u64) -> Self {
        n as f64
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn binomial(n: u64, k: u64) -> Self {
        if k > n {
            return 0.0;
        }
        let k = k.min(n - k);
        let mut acc = 1.0_f64;
        for i in 1..=k {
            // Multiplying before dividing keeps every partial product an
            // integer while it is still representable.
            acc = acc * (n - k + i) as f64 / i as f64;
        }
        acc
    }

    fn binomial_ratio(a: u64, b: u64, n: u64, k: u64) -> Self {
        debug_assert!(k <= n, "C({n}, {k}) is zero");
        if b > a {
            return 0.0;
        }
        let b = b.min(a - b);
        let k = k.min(n - k);
        let mut up = (1..=b).map(|i| (a - b + i) as f64 / i as f64);
        let mut down = (1..=k).map(|i| (n - k + i) as f64 / i as f64);
        // Interleave factors (each >= 1) so the running product stays near 1.
        let mut acc = 1.0_f64;
        loop {
            let step = if acc >= 1.0 {
                down.next()
                    .map(|d| acc / d)
                    .or_else(|| up.next().map(|u| acc * u))
            } else {
                up.next()
                    .map(|u| acc * u)
                    .or_else(|| down.next().map(|d| acc / d))
            };
            match step {
                Some(next) => acc = next,
                None => return acc,
            }
        }
    }

    fn key(&self) -> Self::Key {
        (self / FLOAT_KEY_QUANTUM).round() as i64
    }

    fn approx_eq(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        (self - other).abs() <= FLOAT_KEY_QUANTUM * scale
    }
}

/// `n!` as an arbitrary-precision integer.
pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `C(n, k)` as an arbitrary-precision integer; zero when `k > n`.
pub fn binomial_exact(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc = acc * (n - k + i) / i;
    }
    acc
}

/// `C(n, k)` in the requested number mode; zero when `k > n`.
///
/// Float mode is finite whenever the coefficient itself is representable as
/// an `f64`; use [`binomial_ratio`] for quotients of larger coefficients.
pub fn binomial<S: Scalar>(n: u64, k: u64) -> S {
    S::binomial(n, k)
}

/// `C(a, b) / C(n, k)`; requires `k <= n`.
pub fn binomial_ratio<S: Scalar>(a: u64, b: u64, n: u64, k: u64) -> S {
    S::binomial_ratio(a, b, n, k)
}

/// A probability in `[0, 1]`, always held as an exact rational.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prob(BigRational);

impl Prob {
    pub fn new(value: BigRational) -> Result<Self> {
        if value < BigRational::zero() || value > BigRational::one() {
            return Err(Error::ProbabilityRange(value.to_string()));
        }
        Ok(Prob(value))
    }

    pub fn from_ratio(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::ParseProbability(format!("{num}/{den}")));
        }
        Prob::new(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Self {
        Prob(BigRational::zero())
    }

    pub fn one() -> Self {
        Prob(BigRational::one())
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn to_scalar<S: Scalar>(&self) -> S {
        S::from_rational(&self.0)
    }

    pub fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(&self.0).unwrap_or(f64::NAN)
    }

    pub fn complement(&self) -> Prob {
        Prob(BigRational::one() - &self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Prob {
    type Err = Error;

    /// Accepts `a/b`, `a` or a finite decimal such as `0.01`; decimals are
    /// converted exactly.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseProbability(s.to_string());
        let s = s.trim();
        let value = if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            BigRational::new(num, den)
        } else {
            let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
            if whole.is_empty() && frac.is_empty() {
                return Err(bad());
            }
            if !whole
                .chars()
                .chain(frac.chars())
                .all(|c| c.is_ascii_digit())
            {
                return Err(bad());
            }
            let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
            let scale = num::traits::pow(BigInt::from(10u32), frac.len());
            BigRational::new(digits, scale)
        };
        Prob::new(value)
    }
}
