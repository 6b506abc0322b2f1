//! Exact rationals, extended values and value functions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

use crate::game::StateId;

/// An exact rational number, always kept in lowest terms with a positive
/// denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rat(Ratio<i64>);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid rational `{0}` (expected `p/q` or an integer)")]
pub struct ParseRatError(pub String);

impl Rat {
    pub const ZERO: Rat = Rat(Ratio::new_raw(0, 1));

    /// Builds `numer / denom`. Panics if `denom == 0`.
    pub fn new(numer: i64, denom: i64) -> Rat {
        Rat(Ratio::new(numer, denom))
    }

    pub fn from_int(n: i64) -> Rat {
        Rat(Ratio::from_integer(n))
    }

    /// Builds a rational from wide intermediates (cycle sums, potentials).
    pub(crate) fn from_i128(numer: i128, denom: i128) -> Rat {
        let r = Ratio::new(numer, denom);
        Rat(Ratio::new_raw(
            i64::try_from(*r.numer()).expect("rational numerator overflows i64"),
            i64::try_from(*r.denom()).expect("rational denominator overflows i64"),
        ))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.denom() == 1
    }

    pub fn scale(&self, c: i64) -> Rat {
        Rat(self.0 * Ratio::from_integer(c))
    }

    pub fn div_int(&self, c: i64) -> Rat {
        Rat(self.0 / Ratio::from_integer(c))
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        Rat(self.0 + rhs.0)
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        Rat(self.0 - rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::from_int(n)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Rat, ParseRatError> {
        let err = || ParseRatError(s.to_string());
        let t = s.trim();
        match t.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| err())?;
                let d: i64 = d.trim().parse().map_err(|_| err())?;
                if d == 0 {
                    return Err(err());
                }
                Ok(Rat::new(n, d))
            }
            None => t.parse::<i64>().map(Rat::from_int).map_err(|_| err()),
        }
    }
}

/// A game value: a finite rational or one of the two infinities.
///
/// `NegInf` arises for payoffs of plays that fail the parity condition,
/// `PosInf` for penalties of such plays.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum Value {
    NegInf,
    Fin(Rat),
    PosInf,
}

impl Value {
    pub fn fin(numer: i64, denom: i64) -> Value {
        Value::Fin(Rat::new(numer, denom))
    }

    pub fn as_rat(&self) -> Option<Rat> {
        match self {
            Value::Fin(r) => Some(*r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Value::Fin(_))
    }

    /// Adds a finite offset; infinities absorb it.
    pub fn shift(&self, c: Rat) -> Value {
        match self {
            Value::Fin(r) => Value::Fin(*r + c),
            v => *v,
        }
    }

    /// Multiplies by a positive integer; infinities absorb it.
    pub fn scale(&self, c: i64) -> Value {
        debug_assert!(c > 0);
        match self {
            Value::Fin(r) => Value::Fin(r.scale(c)),
            v => *v,
        }
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Value) -> Ordering {
        use Value::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Fin(a), Fin(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Value) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        match self {
            Value::NegInf => Value::PosInf,
            Value::PosInf => Value::NegInf,
            Value::Fin(r) => Value::Fin(-r),
        }
    }
}

impl From<Rat> for Value {
    fn from(r: Rat) -> Value {
        Value::Fin(r)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::NegInf => f.write_str("-inf"),
            Value::PosInf => f.write_str("inf"),
            Value::Fin(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Value {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Value, ParseRatError> {
        match s.trim() {
            "-inf" => Ok(Value::NegInf),
            "inf" | "+inf" => Ok(Value::PosInf),
            t => t.parse().map(Value::Fin),
        }
    }
}

/// A map from states to values over an explicit domain.
///
/// Indexed by [`StateId`]; states outside the domain hold `None`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValueFunction {
    values: Vec<Option<Value>>,
}

impl ValueFunction {
    /// An empty function over a universe of `n` states.
    pub fn empty(n: usize) -> ValueFunction {
        ValueFunction {
            values: vec![None; n],
        }
    }

    pub fn from_values(values: Vec<Value>) -> ValueFunction {
        ValueFunction {
            values: values.into_iter().map(Some).collect(),
        }
    }


    pub fn universe_size(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, q: StateId) -> Option<Value> {
        self.values.get(q.index()).copied().flatten()
    }

    /// Value at `q`; panics when `q` lies outside the domain.
    pub fn at(&self, q: StateId) -> Value {
        self.get(q)
            .unwrap_or_else(|| panic!("state {} outside value function domain", q.index()))
    }

    pub fn set(&mut self, q: StateId, v: Value) {
        self.values[q.index()] = Some(v);
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.get(q).is_some()
    }

    /// Entries in state order.
    pub fn iter(&self) -> impl Iterator<Item = (StateId, Value)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (StateId(i), v)))
    }

    pub fn domain_len(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Pointwise negation (swaps the infinities).
    pub fn negated(&self) -> ValueFunction {
        ValueFunction {
            values: self.values.iter().map(|v| v.map(|v| -v)).collect(),
        }
    }

    /// Keeps the first `n` entries, e.g. the original states of a reduced game.
    pub fn truncated(&self, n: usize) -> ValueFunction {
        ValueFunction {
            values: self.values[..n].to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rat_lowest_terms() {
        let r = Rat::new(6, -4);
        assert_eq!((r.numer(), r.denom()), (-3, 2));
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(Rat::from_int(1).to_string(), "1/1");
    }

    #[test]
    fn rat_parse() {
        assert_eq!("4/6".parse::<Rat>().unwrap(), Rat::new(2, 3));
        assert_eq!("-7".parse::<Rat>().unwrap(), Rat::from_int(-7));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
    }

    #[test]
    fn value_order() {
        let a = Value::NegInf;
        let b = Value::fin(-100, 1);
        let c = Value::fin(1, 3);
        let d = Value::PosInf;
        assert!(a < b && b < c && c < d);
        assert_eq!(-a, d);
        assert_eq!("-inf".parse::<Value>().unwrap(), Value::NegInf);
        assert_eq!("inf".parse::<Value>().unwrap(), Value::PosInf);
        assert_eq!("2/4".parse::<Value>().unwrap(), Value::fin(1, 2));
    }
}
