//! Scalar abstraction shared by the game, cost and learner modules.
//!
//! Everything that only needs ordered-field arithmetic is generic over
//! [`Scalar`], which is implemented for `f32`, `f64` and exact rationals
//! ([`crate::Rational`]). Code that needs transcendental functions (the
//! experiment harness, the sample-size bound, the baseline optimizer) is
//! written against `f64` directly.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Ordered field element usable throughout the game machinery.
pub trait Scalar:
    Num
    + Signed
    + Clone
    + PartialOrd
    + Debug
    + Display
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// `false` for NaN and infinities; exact types are always finite.
    fn is_finite_value(&self) -> bool {
        true
    }

    /// Converts an `f64` literal. Panics on NaN/inf, which never reach this
    /// from validated inputs.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(|| panic!("scalar cannot represent {v}"))
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `true` when repeated arithmetic is exact (rationals).
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for f32 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for BigRational {
    fn is_exact() -> bool {
        true
    }
}

impl Scalar for Ratio<i64> {
    fn is_exact() -> bool {
        true
    }
}

/// Exact rational built from a numerator/denominator pair.
pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub(crate) fn max0<S: Scalar>(v: S) -> S {
    if v > S::zero() {
        v
    } else {
        S::zero()
    }
}

pub(crate) fn min_of<S: Scalar>(a: S, b: S) -> S {
    if b < a {
        b
    } else {
        a
    }
}

pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub(crate) fn total_cmp<S: Scalar>(a: &S, b: &S) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Real number extended with `+∞`.
///
/// Thresholds use `+∞` to mean "reject everything"; `∞ − 2 = ∞`.
#[derive(Debug, Clone, PartialEq)]
pub enum Ext<S> {
    Finite(S),
    Infinity,
}

impl<S: Scalar> Ext<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            Ext::Finite(v) => Some(v),
            Ext::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Ext::Infinity)
    }

    /// Shifts a finite value; infinity absorbs.
    pub fn minus(&self, d: &S) -> Ext<S> {
        match self {
            Ext::Finite(v) => Ext::Finite(v.clone() - d.clone()),
            Ext::Infinity => Ext::Infinity,
        }
    }

    /// `v ≥ self`, with nothing at or above `+∞`.
    pub fn admits(&self, v: &S) -> bool {
        match self {
            Ext::Finite(t) => v >= t,
            Ext::Infinity => false,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Ext::Finite(v) => v.to_f64_lossy(),
            Ext::Infinity => f64::INFINITY,
        }
    }
}

impl<S: Scalar> PartialOrd for Ext<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => a.partial_cmp(b),
            (Ext::Finite(_), Ext::Infinity) => Some(Ordering::Less),
            (Ext::Infinity, Ext::Finite(_)) => Some(Ordering::Greater),
            (Ext::Infinity, Ext::Infinity) => Some(Ordering::Equal),
        }
    }
}

impl<S: Scalar> Display for Ext<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ext::Finite(v) => write!(f, "{v}"),
            Ext::Infinity => write!(f, "inf"),
        }
    }
}

// JSON has no infinity literal; `+∞` travels as the string "inf".
impl<S: Serialize> Serialize for Ext<S> {
    fn serialize<Z: Serializer>(&self, ser: Z) -> Result<Z::Ok, Z::Error> {
        match self {
            Ext::Finite(v) => v.serialize(ser),
            Ext::Infinity => ser.serialize_str("inf"),
        }
    }
}

impl<'de, S: Deserialize<'de>> Deserialize<'de> for Ext<S> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr<S> {
            Num(S),
            Str(String),
        }
        match Repr::<S>::deserialize(de)? {
            Repr::Num(v) => Ok(Ext::Finite(v)),
            Repr::Str(s) if matches!(s.as_str(), "inf" | "+inf" | "infinity") => Ok(Ext::Infinity),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("bad extended real {s:?}"))),
        }
    }
}
