use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::rational::{int_valuation, valuation, Rational};
use crate::error::{Error, Result};

/// A p-adic number known modulo a power of p: the value lies in
/// `unit * p^shift + p^abs_prec Z_p`. `abs_prec = None` marks an exact value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PadicBall {
    #[serde(serialize_with = "ser_big")]
    p: BigInt,
    #[serde(serialize_with = "ser_big")]
    unit: BigInt,
    shift: i64,
    abs_prec: Option<i64>,
}

fn ser_big<S: serde::Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

fn pow(p: &BigInt, e: i64) -> BigInt {
    num_traits::pow(p.clone(), e.max(0) as usize)
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

impl PadicBall {
    pub fn exact_integer(p: &BigInt, n: BigInt) -> PadicBall {
        PadicBall { p: p.clone(), unit: n, shift: 0, abs_prec: None }
    }

    /// `unit` modulo `p^digits`, for a p-adic integer known to that precision.
    pub fn integer_mod(p: &BigInt, unit: BigInt, digits: i64) -> PadicBall {
        PadicBall { p: p.clone(), unit, shift: 0, abs_prec: Some(digits) }.reduced()
    }

    /// Rational number, exact when it is an integer; otherwise known to
    /// `digits` digits beyond its valuation.
    pub fn from_rational(p: &BigInt, q: &Rational, digits: i64) -> PadicBall {
        if q.is_integer() {
            return PadicBall::exact_integer(p, q.numer().clone());
        }
        let v = valuation(p, q).expect("nonzero non-integer");
        let num = q.numer() / pow(p, v.max(0));
        let den = q.denom() / pow(p, (-v).max(0));
        let m = pow(p, digits);
        let inv = modinv(&den, &m).expect("unit denominator");
        PadicBall { p: p.clone(), unit: (num * inv).mod_floor(&m), shift: v, abs_prec: Some(v + digits) }
    }

    pub fn prime(&self) -> &BigInt {
        &self.p
    }

    pub fn is_exact(&self) -> bool {
        self.abs_prec.is_none()
    }

    pub fn abs_prec(&self) -> Option<i64> {
        self.abs_prec
    }

    /// Moves the powers of p out of `unit` into `shift`, then reduces `unit`
    /// modulo p^(abs_prec − shift). Without the first step the shift drifts
    /// down and the unit grows without bound under repeated elimination.
    fn reduced(mut self) -> PadicBall {
        if let Some(k) = int_valuation(&self.p, &self.unit).filter(|&k| k > 0) {
            self.unit /= pow(&self.p, k as i64);
            self.shift += k as i64;
        }
        if let Some(a) = self.abs_prec {
            let e = a - self.shift;
            if e <= 0 {
                self.unit = BigInt::zero();
            } else if !self.unit.is_zero() {
                self.unit = self.unit.mod_floor(&pow(&self.p, e));
            }
        }
        self
    }

    /// Lower bound on the valuation that is valid for every element of the ball.
    fn val_lower(&self) -> Option<i64> {
        let v = int_valuation(&self.p, &self.unit).map(|u| u as i64 + self.shift);
        match (v, self.abs_prec) {
            (None, a) => a,
            (Some(v), None) => Some(v),
            (Some(v), Some(a)) => Some(v.min(a)),
        }
    }

    pub fn add(&self, o: &PadicBall) -> PadicBall {
        let m = self.shift.min(o.shift);
        let unit = &self.unit * pow(&self.p, self.shift - m) + &o.unit * pow(&self.p, o.shift - m);
        PadicBall { p: self.p.clone(), unit, shift: m, abs_prec: min_opt(self.abs_prec, o.abs_prec) }
            .reduced()
    }

    pub fn neg(&self) -> PadicBall {
        PadicBall { p: self.p.clone(), unit: -&self.unit, shift: self.shift, abs_prec: self.abs_prec }
            .reduced()
    }

    pub fn sub(&self, o: &PadicBall) -> PadicBall {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &PadicBall) -> PadicBall {
        for z in [self, o] {
            if z.is_exact() && z.unit.is_zero() {
                return PadicBall::exact_integer(&self.p, BigInt::zero());
            }
        }
        let a_err = self.abs_prec.map(|a| a + o.val_lower().unwrap_or(i64::MAX / 4));
        let b_err = o.abs_prec.map(|b| b + self.val_lower().unwrap_or(i64::MAX / 4));
        let unit = &self.unit * &o.unit;
        PadicBall { p: self.p.clone(), unit, shift: self.shift + o.shift, abs_prec: min_opt(a_err, b_err) }
            .reduced()
    }

    pub fn mul_rational(&self, q: &Rational, digits: i64) -> PadicBall {
        self.mul(&PadicBall::from_rational(&self.p, q, digits))
    }

    /// Exact valuation, `Ok(None)` for an exact zero, and an error when the
    /// ball still contains zero.
    pub fn valuation(&self) -> Result<Option<i64>> {
        match int_valuation(&self.p, &self.unit) {
            Some(v) => Ok(Some(v as i64 + self.shift)),
            None if self.is_exact() => Ok(None),
            None => Err(Error::PrecisionExhausted(format!(
                "{}-adic value indistinguishable from 0 modulo p^{}",
                self.p,
                self.abs_prec.unwrap_or(0)
            ))),
        }
    }

    /// Inverse known to `digits` digits beyond its valuation (fewer when the
    /// input itself is less precise).
    pub fn inv(&self, digits: i64) -> Result<PadicBall> {
        let v = self
            .valuation()?
            .ok_or_else(|| Error::DomainError("p-adic inverse of zero".into()))?;
        let u = &self.unit / pow(&self.p, v - self.shift);
        let rel = self.abs_prec.map_or(digits, |a| (a - v).min(digits)).max(1);
        let m = pow(&self.p, rel);
        let inv = modinv(&u.mod_floor(&m), &m).expect("unit");
        Ok(PadicBall { p: self.p.clone(), unit: inv, shift: -v, abs_prec: Some(rel - v) }.reduced())
    }

    /// |x|_p = p^(-v) as an exact rational.
    pub fn abs(&self) -> Result<Rational> {
        Ok(match self.valuation()? {
            None => Rational::zero(),
            Some(v) if v >= 0 => Rational::new(BigInt::one(), pow(&self.p, v)),
            Some(v) => Rational::from_integer(pow(&self.p, -v)),
        })
    }

    /// Residue of a p-adic integer modulo p^k.
    pub fn residue(&self, k: i64) -> BigInt {
        (&self.unit * pow(&self.p, self.shift)).mod_floor(&pow(&self.p, k))
    }
}

pub fn modinv(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

impl fmt::Display for PadicBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.abs_prec {
            None => write!(f, "{}*{}^{}", self.unit, self.p, self.shift),
            Some(a) => write!(f, "{}*{}^{} + O({}^{})", self.unit, self.p, self.shift, self.p, a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;

    #[test]
    fn representation_stays_bounded_under_elimination() {
        // x ← x − (x/π)·π with π = 7·5 leaves the digit count of x unchanged
        let p = BigInt::from(7);
        let pi = PadicBall::exact_integer(&p, BigInt::from(35));
        let mut x = PadicBall::from_rational(&p, &rat(2, 3), 40).add(&pi);
        for _ in 0..200 {
            let f = x.mul(&pi.inv(40).unwrap());
            x = x.sub(&f.mul(&pi).sub(&pi));
            assert!(int_valuation(&p, &x.unit).is_none_or(|k| k == 0));
            assert!(x.unit.bits() <= 200, "{} bits", x.unit.bits());
            assert!(x.shift >= 0);
        }
    }

    #[test]
    fn arithmetic_and_valuations() {
        let p = BigInt::from(7);
        let x = PadicBall::from_rational(&p, &rat(3, 49), 10);
        assert_eq!(x.valuation().unwrap(), Some(-2));
        assert_eq!(x.abs().unwrap(), Rational::from_integer(BigInt::from(49)));
        let y = PadicBall::from_rational(&p, &rat(1, 3), 10);
        let prod = x.mul(&y);
        assert_eq!(prod.valuation().unwrap(), Some(-2));
        // 1/3 * 3 = 1 up to precision
        let three = PadicBall::exact_integer(&p, BigInt::from(3));
        let one = y.mul(&three);
        assert_eq!(one.residue(8), BigInt::one());
        let zero = one.sub(&PadicBall::exact_integer(&p, BigInt::one()));
        assert!(zero.valuation().is_err());
    }
}
