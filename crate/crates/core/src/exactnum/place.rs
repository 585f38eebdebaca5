use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::primes::is_prime;
use super::rational::{valuation, Rational};
use crate::error::{Error, Result};

/// A place of Q: the real absolute value or a p-adic one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Archimedean,
    Finite(BigInt),
}

impl Place {
    pub fn finite(p: impl Into<BigInt>) -> Result<Place> {
        let p = p.into();
        if !is_prime(&p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        Ok(Place::Finite(p))
    }

    pub fn is_archimedean(&self) -> bool {
        matches!(self, Place::Archimedean)
    }

    pub fn prime(&self) -> Option<&BigInt> {
        match self {
            Place::Archimedean => None,
            Place::Finite(p) => Some(p),
        }
    }

    pub fn parse(s: &str) -> Result<Place> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞" | "oo") {
            return Ok(Place::Archimedean);
        }
        let p: BigInt = s
            .parse()
            .map_err(|_| Error::InvalidInput(format!("not a place: {s:?}")))?;
        Place::finite(p)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Archimedean => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Place::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Normalized absolute value on Q: |p|_p = 1/p, and the usual |x| at infinity.
/// Both are exact rationals.
pub fn abs_value(v: &Place, x: &Rational) -> Rational {
    match v {
        Place::Archimedean => x.abs(),
        Place::Finite(p) => match valuation(p, x) {
            None => Rational::zero(),
            Some(e) if e >= 0 => Rational::new(BigInt::one(), num_traits::pow(p.clone(), e as usize)),
            Some(e) => Rational::from_integer(num_traits::pow(p.clone(), (-e) as usize)),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};

    #[test]
    fn absolute_values() {
        assert_eq!(abs_value(&Place::finite(2).unwrap(), &int(12)), rat(1, 4));
        assert_eq!(abs_value(&Place::Archimedean, &int(5)), int(5));
        assert_eq!(abs_value(&Place::finite(3).unwrap(), &rat(3, 4)), rat(1, 3));
        assert_eq!(abs_value(&Place::finite(2).unwrap(), &rat(3, 4)), int(4));
        assert_eq!(abs_value(&Place::finite(5).unwrap(), &int(0)), int(0));
    }

    #[test]
    fn parse_places() {
        assert_eq!(Place::parse("inf").unwrap(), Place::Archimedean);
        assert_eq!(Place::parse("7").unwrap(), Place::Finite(BigInt::from(7)));
        assert!(Place::parse("9").is_err());
    }
}
