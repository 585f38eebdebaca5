use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number. `BigRational` keeps the invariant
/// gcd(|num|, den) = 1 with den > 0 after every operation.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_bigint(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// Parses `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(p: &BigInt, n: &BigInt) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn valuation(p: &BigInt, x: &Rational) -> Option<i64> {
    let vn = int_valuation(p, x.numer())? as i64;
    let vd = int_valuation(p, x.denom()).unwrap_or(0) as i64;
    Some(vn - vd)
}

/// `x * 2^e` exactly.
pub fn mul_pow2(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        Rational::new(x.numer() << (e as usize), x.denom().clone())
    } else {
        Rational::new(x.numer().clone(), x.denom() << ((-e) as usize))
    }
}

/// Floor of log2 |x| up to one unit: returns e with 2^(e-1) < |x| < 2^(e+1).
pub fn approx_log2(x: &Rational) -> i64 {
    x.numer().bits() as i64 - x.denom().bits() as i64
}

/// Total bit size of numerator and denominator.
pub fn bit_size(x: &Rational) -> u64 {
    x.numer().bits() + x.denom().bits()
}

pub fn floor_int(x: &Rational) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil_int(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

/// Exact k-th root of a nonnegative rational when it exists.
pub fn exact_root(x: &Rational, k: u32) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().nth_root(k);
    let d = x.denom().nth_root(k);
    if num_traits::pow(n.clone(), k as usize) == *x.numer()
        && num_traits::pow(d.clone(), k as usize) == *x.denom()
    {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Largest dyadic `m/2^s` with `(m/2^s)^k <= x`, for x >= 0.
pub fn root_lower(x: &Rational, k: u32, s: u64) -> Rational {
    let scaled = x * from_bigint(BigInt::one() << (s as usize * k as usize));
    let m = floor_int(&scaled).nth_root(k);
    Rational::new(m, BigInt::one() << s as usize)
}

/// Smallest dyadic `m/2^s` with `(m/2^s)^k >= x`, for x >= 0.
pub fn root_upper(x: &Rational, k: u32, s: u64) -> Rational {
    let scaled = x * from_bigint(BigInt::one() << (s as usize * k as usize));
    let c = ceil_int(&scaled);
    let mut m = c.nth_root(k);
    if num_traits::pow(m.clone(), k as usize) < c {
        m += 1;
    }
    Rational::new(m, BigInt::one() << s as usize)
}

pub fn to_f64(x: &Rational) -> f64 {
    let e = approx_log2(x);
    if e.abs() < 900 {
        let shift = 60 - e;
        let scaled = floor_int(&mul_pow2(x, shift));
        scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(shift as i32))
    } else if e > 0 {
        if x.numer().sign() == Sign::Minus {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else {
        0.0
    }
}

pub fn min_rat<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_rat<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn lcm_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x))
}

/// Serde adaptor writing rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rational_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
