//! Commutative semirings used as output and coefficient domains.
//!
//! Every coalgebraic structure in this crate is parametric in a
//! [`Semiring`]. Two instances are provided: [`Boolean`] (languages) and
//! [`Natural`] (counting series, with arbitrary-precision coefficients).

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// A commutative semiring `(K, +, ·, 0, 1)`.
///
/// Values are immutable and compared structurally, so they can be used as
/// map keys and as test oracles.
pub trait Semiring: Clone + Eq + Ord + Hash + Debug + Display + Send + Sync + 'static {
    /// Short name used on the command line and in file headers.
    const NAME: &'static str;
    /// Whether `k + k = k` holds for every element.
    const IDEMPOTENT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;

    /// Parses a decimal literal. Returns `None` for values outside the carrier.
    fn parse(text: &str) -> Option<Self>;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn sum<'a, I>(items: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
    {
        items.into_iter().fold(Self::zero(), |acc, k| acc.add(k))
    }
}

/// The embedding of the Booleans into `K`: `1 ↦ one`, `0 ↦ zero`.
///
/// This is a semiring morphism, so `embed_indicator(o).mul(k)` is `k` when
/// `o` holds and zero otherwise.
pub fn embed_indicator<K: Semiring>(b: bool) -> K {
    if b {
        K::one()
    } else {
        K::zero()
    }
}

/// The Boolean semiring `({0, 1}, ∨, ∧, 0, 1)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Boolean(pub bool);

impl Semiring for Boolean {
    const NAME: &'static str = "bool";
    const IDEMPOTENT: bool = true;

    fn zero() -> Self {
        Boolean(false)
    }

    fn one() -> Self {
        Boolean(true)
    }

    fn add(&self, other: &Self) -> Self {
        Boolean(self.0 || other.0)
    }

    fn mul(&self, other: &Self) -> Self {
        Boolean(self.0 && other.0)
    }

    fn parse(text: &str) -> Option<Self> {
        match text {
            "0" => Some(Boolean(false)),
            "1" => Some(Boolean(true)),
            _ => None,
        }
    }
}

impl Display for Boolean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "1" } else { "0" })
    }
}

impl From<bool> for Boolean {
    fn from(b: bool) -> Self {
        Boolean(b)
    }
}

/// The semiring of natural numbers `(ℕ, +, ·, 0, 1)` without overflow.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Natural(pub BigUint);

impl Natural {
    pub fn new(n: u64) -> Self {
        Natural(BigUint::from(n))
    }
}

impl Semiring for Natural {
    const NAME: &'static str = "nat";
    const IDEMPOTENT: bool = false;

    fn zero() -> Self {
        Natural(BigUint::zero())
    }

    fn one() -> Self {
        Natural(BigUint::one())
    }

    fn add(&self, other: &Self) -> Self {
        Natural(&self.0 + &other.0)
    }

    fn mul(&self, other: &Self) -> Self {
        Natural(&self.0 * &other.0)
    }

    fn parse(text: &str) -> Option<Self> {
        if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        BigUint::from_str(text).ok().map(Natural)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn is_one(&self) -> bool {
        self.0.is_one()
    }
}

impl Display for Natural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(&self.0, f)
    }
}

impl From<u64> for Natural {
    fn from(n: u64) -> Self {
        Natural::new(n)
    }
}

/// Runtime selector for the two provided semirings.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SemiringKind {
    Bool,
    Nat,
}

impl SemiringKind {
    pub fn name(self) -> &'static str {
        match self {
            SemiringKind::Bool => Boolean::NAME,
            SemiringKind::Nat => Natural::NAME,
        }
    }
}

impl FromStr for SemiringKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bool" => Ok(SemiringKind::Bool),
            "nat" => Ok(SemiringKind::Nat),
            other => Err(format!("unknown semiring `{other}` (expected bool or nat)")),
        }
    }
}

impl Display for SemiringKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
