use std::fmt;

use serde::Serialize;

use super::ball::RealBall;
use super::rational::Rational;
use crate::error::Result;

/// Rectangular complex ball: independent real balls for both parts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexBall {
    pub re: RealBall,
    pub im: RealBall,
}

impl ComplexBall {
    pub fn new(re: RealBall, im: RealBall) -> ComplexBall {
        ComplexBall { re, im }
    }

    pub fn from_real(re: RealBall) -> ComplexBall {
        let p = re.prec();
        ComplexBall { re, im: RealBall::zero(p) }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> ComplexBall {
        ComplexBall::from_real(RealBall::exact(q.clone(), prec))
    }

    pub fn zero(prec: u32) -> ComplexBall {
        ComplexBall::from_real(RealBall::zero(prec))
    }

    pub fn one(prec: u32) -> ComplexBall {
        ComplexBall::from_real(RealBall::one(prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_real(&self) -> bool {
        self.im.exact_value().is_some_and(num_traits::Zero::is_zero)
    }

    pub fn add(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> ComplexBall {
        ComplexBall { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> ComplexBall {
        ComplexBall { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &ComplexBall) -> ComplexBall {
        if self.is_real() && o.is_real() {
            return ComplexBall::from_real(self.re.mul(&o.re));
        }
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        ComplexBall { re, im }
    }

    pub fn mul_real(&self, r: &RealBall) -> ComplexBall {
        ComplexBall { re: self.re.mul(r), im: self.im.mul(r) }
    }

    pub fn mul_q(&self, q: &Rational) -> ComplexBall {
        ComplexBall { re: self.re.mul_q(q), im: self.im.mul_q(q) }
    }

    /// |z|^2 as a real ball.
    pub fn norm_sqr(&self) -> RealBall {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn abs(&self) -> Result<RealBall> {
        if self.is_real() {
            return Ok(self.re.abs());
        }
        self.norm_sqr().sqrt()
    }

    pub fn inv(&self) -> Result<ComplexBall> {
        if self.is_real() {
            return Ok(ComplexBall::from_real(self.re.inv()?));
        }
        let n = self.norm_sqr().inv()?;
        Ok(self.conj().mul_real(&n))
    }

    pub fn div(&self, o: &ComplexBall) -> Result<ComplexBall> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn powi(&self, k: u32) -> ComplexBall {
        let mut acc = ComplexBall::one(self.prec());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn contains(&self, o: &ComplexBall) -> bool {
        self.re.contains_ball(&o.re) && self.im.contains_ball(&o.im)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + i({})", self.re, self.im)
    }
}
