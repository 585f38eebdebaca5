use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::rational::{
    approx_log2, bit_size, exact_root, format_rational, int, mul_pow2, rat, root_lower, root_upper,
    to_f64, Rational,
};
use super::verdict::Verdict;
use crate::error::{Error, Result};

/// Closed real interval `[mid - rad, mid + rad]` with rational endpoints.
///
/// Midpoints are rounded to `prec` significant bits once they grow beyond
/// that size; the rounding error is always added to the radius. Small exact
/// inputs stay exact (radius zero) through ring operations.
#[derive(Clone, Debug, PartialEq)]
pub struct RealBall {
    mid: Rational,
    rad: Rational,
    prec: u32,
}

const RAD_BITS: i64 = 30;

fn round_rad_up(r: Rational) -> Rational {
    if bit_size(&r) <= 2 * RAD_BITS as u64 + 8 || r.is_zero() {
        return r;
    }
    let s = RAD_BITS - approx_log2(&r);
    let scaled = mul_pow2(&r, s).ceil();
    mul_pow2(&scaled, -s)
}

impl RealBall {
    pub fn exact(q: Rational, prec: u32) -> RealBall {
        RealBall { mid: q, rad: Rational::zero(), prec }
    }

    pub fn from_int(n: i64, prec: u32) -> RealBall {
        RealBall::exact(int(n), prec)
    }

    pub fn zero(prec: u32) -> RealBall {
        RealBall::exact(Rational::zero(), prec)
    }

    pub fn one(prec: u32) -> RealBall {
        RealBall::exact(Rational::one(), prec)
    }

    pub fn new(mid: Rational, rad: Rational, prec: u32) -> RealBall {
        assert!(!rad.is_negative());
        RealBall { mid, rad, prec }.normalize()
    }

    pub fn from_interval(lo: Rational, hi: Rational, prec: u32) -> RealBall {
        assert!(lo <= hi, "empty interval");
        let mid = (&lo + &hi) / int(2);
        let rad = (&hi - &lo) / int(2);
        RealBall { mid, rad, prec }.normalize()
    }

    fn normalize(mut self) -> RealBall {
        if bit_size(&self.mid) > self.prec as u64 + 64 && !self.mid.is_zero() {
            let s = self.prec as i64 - approx_log2(&self.mid);
            let rounded = mul_pow2(&mul_pow2(&self.mid, s).round(), -s);
            self.rad += mul_pow2(&Rational::one(), -s);
            self.mid = rounded;
        }
        self.rad = round_rad_up(self.rad);
        self
    }

    pub fn mid(&self) -> &Rational {
        &self.mid
    }

    pub fn rad(&self) -> &Rational {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(mut self, prec: u32) -> RealBall {
        self.prec = prec;
        self
    }

    pub fn lo(&self) -> Rational {
        &self.mid - &self.rad
    }

    pub fn hi(&self) -> Rational {
        &self.mid + &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn exact_value(&self) -> Option<&Rational> {
        if self.rad.is_zero() {
            Some(&self.mid)
        } else {
            None
        }
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.lo() <= *q && *q <= self.hi()
    }

    pub fn contains_ball(&self, other: &RealBall) -> bool {
        self.lo() <= other.lo() && other.hi() <= self.hi()
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Rational::zero())
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.mid)
    }

    /// log2 of the radius, or `None` for exact balls.
    pub fn rad_log2(&self) -> Option<i64> {
        if self.rad.is_zero() {
            None
        } else {
            Some(approx_log2(&self.rad))
        }
    }

    fn p(&self, o: &RealBall) -> u32 {
        self.prec.max(o.prec)
    }

    pub fn add(&self, o: &RealBall) -> RealBall {
        RealBall { mid: &self.mid + &o.mid, rad: &self.rad + &o.rad, prec: self.p(o) }.normalize()
    }

    pub fn sub(&self, o: &RealBall) -> RealBall {
        RealBall { mid: &self.mid - &o.mid, rad: &self.rad + &o.rad, prec: self.p(o) }.normalize()
    }

    pub fn neg(&self) -> RealBall {
        RealBall { mid: -&self.mid, rad: self.rad.clone(), prec: self.prec }
    }

    pub fn mul(&self, o: &RealBall) -> RealBall {
        let rad = self.mid.abs() * &o.rad + o.mid.abs() * &self.rad + &self.rad * &o.rad;
        RealBall { mid: &self.mid * &o.mid, rad, prec: self.p(o) }.normalize()
    }

    pub fn add_q(&self, q: &Rational) -> RealBall {
        RealBall { mid: &self.mid + q, rad: self.rad.clone(), prec: self.prec }.normalize()
    }

    pub fn mul_q(&self, q: &Rational) -> RealBall {
        RealBall { mid: &self.mid * q, rad: &self.rad * q.abs(), prec: self.prec }.normalize()
    }

    pub fn sqr(&self) -> RealBall {
        let a = self.abs();
        let lo = a.lo();
        let hi = a.hi();
        let lo = if lo.is_negative() { Rational::zero() } else { lo };
        if self.is_exact() {
            return RealBall::exact(&self.mid * &self.mid, self.prec).normalize();
        }
        RealBall::from_interval(&lo * &lo, &hi * &hi, self.prec)
    }

    pub fn powi(&self, k: u32) -> RealBall {
        let mut acc = RealBall::one(self.prec);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn abs(&self) -> RealBall {
        let lo = self.lo();
        let hi = self.hi();
        if !lo.is_negative() {
            self.clone()
        } else if !hi.is_positive() {
            self.neg()
        } else {
            let top = if -&lo > hi { -lo } else { hi };
            RealBall::from_interval(Rational::zero(), top, self.prec)
        }
    }

    pub fn inv(&self) -> Result<RealBall> {
        let lo = self.lo();
        let hi = self.hi();
        if !lo.is_positive() && !hi.is_negative() {
            return Err(Error::PrecisionExhausted("division by a ball containing zero".into()));
        }
        if self.is_exact() {
            return Ok(RealBall::exact(self.mid.recip(), self.prec).normalize());
        }
        let (a, b) = (hi.recip(), lo.recip());
        Ok(RealBall::from_interval(a.clone().min(b.clone()), a.max(b), self.prec))
    }

    pub fn div(&self, o: &RealBall) -> Result<RealBall> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn max(&self, o: &RealBall) -> RealBall {
        let lo = self.lo().max(o.lo());
        let hi = self.hi().max(o.hi());
        if self.is_exact() && o.is_exact() {
            return RealBall::exact(lo, self.p(o));
        }
        RealBall::from_interval(lo, hi, self.p(o))
    }

    pub fn min(&self, o: &RealBall) -> RealBall {
        let lo = self.lo().min(o.lo());
        let hi = self.hi().min(o.hi());
        if self.is_exact() && o.is_exact() {
            return RealBall::exact(lo, self.p(o));
        }
        RealBall::from_interval(lo, hi, self.p(o))
    }

    /// Smallest ball containing both.
    pub fn hull(&self, o: &RealBall) -> RealBall {
        let lo = self.lo().min(o.lo());
        let hi = self.hi().max(o.hi());
        RealBall::from_interval(lo, hi, self.p(o))
    }

    /// Encloses min(max(x, lo), hi) for every x in the ball.
    pub fn clamp(&self, lo: &Rational, hi: &Rational) -> RealBall {
        let a = self.lo().max(lo.clone());
        let b = self.hi().min(hi.clone());
        if a > b {
            let edge = if self.hi() < *lo { lo } else { hi };
            return RealBall::exact(edge.clone(), self.prec);
        }
        if a == b {
            return RealBall::exact(a, self.prec);
        }
        if self.lo() >= *lo && self.hi() <= *hi {
            return self.clone();
        }
        RealBall::from_interval(a, b, self.prec)
    }

    /// k-th root of a ball whose true value is known to be nonnegative.
    pub fn nth_root(&self, k: u32) -> Result<RealBall> {
        assert!(k >= 1);
        if k == 1 {
            return Ok(self.clone());
        }
        let hi = self.hi();
        if hi.is_negative() {
            return Err(Error::DomainError("root of a negative number".into()));
        }
        if let Some(q) = self.exact_value() {
            if let Some(r) = exact_root(q, k) {
                return Ok(RealBall::exact(r, self.prec));
            }
        }
        let lo = self.lo().max(Rational::zero());
        let s_of = |x: &Rational| -> u64 {
            let e = if x.is_zero() { 0 } else { approx_log2(x) / k as i64 };
            (self.prec as i64 + 4 - e).max(4) as u64
        };
        let lo_root = if lo.is_zero() { Rational::zero() } else { root_lower(&lo, k, s_of(&lo)) };
        let hi_root = root_upper(&hi, k, s_of(&hi));
        Ok(RealBall::from_interval(lo_root, hi_root, self.prec))
    }

    pub fn sqrt(&self) -> Result<RealBall> {
        self.nth_root(2)
    }

    /// Natural logarithm; the ball must lie in (0, +inf).
    pub fn ln(&self) -> Result<RealBall> {
        let lo = self.lo();
        if !lo.is_positive() {
            return Err(Error::PrecisionExhausted(format!(
                "logarithm of a ball reaching {}",
                format_rational(&lo)
            )));
        }
        if self.mid.is_one() && self.is_exact() {
            return Ok(RealBall::zero(self.prec));
        }
        let core = ln_rational(&self.mid, self.prec);
        let slack = &self.rad / &lo;
        Ok(RealBall { mid: core.mid, rad: core.rad + slack, prec: self.prec }.normalize())
    }

    pub fn lt(&self, o: &RealBall) -> Verdict {
        if self.hi() < o.lo() {
            Verdict::True
        } else if self.lo() >= o.hi() {
            Verdict::False
        } else {
            Verdict::Unknown(self.p(o))
        }
    }

    pub fn le(&self, o: &RealBall) -> Verdict {
        if self.hi() <= o.lo() {
            Verdict::True
        } else if self.lo() > o.hi() {
            Verdict::False
        } else {
            Verdict::Unknown(self.p(o))
        }
    }

    pub fn gt(&self, o: &RealBall) -> Verdict {
        o.lt(self)
    }

    pub fn ge(&self, o: &RealBall) -> Verdict {
        o.le(self)
    }
}

fn atanh_series(z: &Rational, prec: u32) -> RealBall {
    // sum_{j<J} z^(2j+1)/(2j+1), tail <= |z|^(2J+1) / ((2J+1)(1 - z^2))
    let wp = prec + 24;
    let az = z.abs();
    assert!(az < rat(1, 2));
    let bits_per_term = (2.0 * -(to_f64(&az).log2())).max(1.0);
    let terms = (wp as f64 / bits_per_term).ceil() as u32 + 2;
    let zb = RealBall::exact(z.clone(), wp).normalize();
    let z2 = zb.sqr();
    let mut power = zb;
    let mut sum = RealBall::zero(wp);
    for j in 0..terms {
        sum = sum.add(&power.mul_q(&rat(1, 2 * j as i64 + 1)));
        power = power.mul(&z2);
    }
    let n = 2 * terms + 1;
    let u = mul_pow2(&mul_pow2(&az, 20).ceil(), -20);
    let tail_bound = num_traits::pow(u.clone(), n as usize) / (int(n as i64) * (Rational::one() - &u * &u));
    RealBall { mid: sum.mid, rad: sum.rad + tail_bound, prec: wp }.normalize()
}

fn ln2(prec: u32) -> RealBall {
    atanh_series(&rat(1, 3), prec).mul_q(&int(2))
}

/// ln(q) for rational q > 0, as a ball of width about 2^-prec.
pub fn ln_rational(q: &Rational, prec: u32) -> RealBall {
    assert!(q.is_positive());
    if q.is_one() {
        return RealBall::zero(prec);
    }
    let mut k = approx_log2(q);
    let mut m = mul_pow2(q, -k);
    while m > rat(4, 3) {
        m = mul_pow2(&m, -1);
        k += 1;
    }
    while m < rat(2, 3) {
        m = mul_pow2(&m, 1);
        k -= 1;
    }
    let wp = prec + 16 + (64 - (k.unsigned_abs() | 1).leading_zeros());
    let z = (&m - Rational::one()) / (&m + Rational::one());
    let lnm = atanh_series(&z, wp).mul_q(&int(2));
    let r = if k == 0 { lnm } else { ln2(wp).mul_q(&Rational::from_integer(BigInt::from(k))).add(&lnm) };
    r.with_prec(prec).normalize()
}

impl fmt::Display for RealBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", format_rational(&self.mid))
        } else {
            write!(f, "{:.12e} +/- {:.3e}", self.to_f64(), to_f64(&self.rad))
        }
    }
}

impl Serialize for RealBall {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RealBall", 4)?;
        st.serialize_field("mid", &format_rational(&self.mid))?;
        st.serialize_field("rad", &format_rational(&self.rad))?;
        st.serialize_field("bits", &self.prec)?;
        st.serialize_field("approx", &self.to_f64())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(b: &RealBall, x: f64, tol: f64) -> bool {
        (b.to_f64() - x).abs() < tol
    }

    #[test]
    fn logarithms_enclose_reference_values() {
        let l2 = ln_rational(&int(2), 128);
        assert!(close(&l2, std::f64::consts::LN_2, 1e-15));
        assert!(l2.rad_log2().unwrap() < -120);
        let l5 = ln_rational(&int(5), 128);
        assert!(close(&l5, 5f64.ln(), 1e-14));
        let small = ln_rational(&rat(1, 1000), 128);
        assert!(close(&small, (0.001f64).ln(), 1e-13));
        // ln(a) + ln(b) and ln(ab) overlap
        let ab = ln_rational(&rat(35, 3), 96);
        let s = ln_rational(&int(35), 96).sub(&ln_rational(&int(3), 96));
        assert!(ab.lt(&s).is_unknown());
    }

    #[test]
    fn roots_stay_exact_when_possible() {
        let b = RealBall::exact(rat(9, 4), 64);
        assert_eq!(b.sqrt().unwrap().exact_value(), Some(&rat(3, 2)));
        let r2 = RealBall::from_int(2, 128).sqrt().unwrap();
        assert!(r2.sqr().contains(&int(2)));
        assert!(r2.rad_log2().unwrap() < -120);
    }

    #[test]
    fn comparisons_are_three_valued() {
        let a = RealBall::new(int(1), rat(1, 10), 64);
        let b = RealBall::new(int(2), rat(1, 10), 64);
        assert_eq!(a.lt(&b), Verdict::True);
        assert_eq!(b.lt(&a), Verdict::False);
        let c = RealBall::new(rat(11, 10), rat(1, 5), 64);
        assert!(a.lt(&c).is_unknown());
        assert_eq!(RealBall::zero(64).le(&RealBall::zero(64)), Verdict::True);
    }

    #[test]
    fn division_by_straddling_ball_fails() {
        let z = RealBall::new(int(0), rat(1, 10), 64);
        assert!(RealBall::one(64).div(&z).is_err());
    }
}
