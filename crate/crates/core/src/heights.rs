//! Heights, v-adic spherical distances and proximity on the projective line.
//!
//! Finite places use the max norm of a homogeneous representative, the
//! archimedean place uses the euclidean norm. Over Q a point is stored by its
//! coprime integer representative, so only the archimedean term of its
//! height survives.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::ball::ln_rational;
use crate::exactnum::complex::ComplexBall;
use crate::exactnum::embed::{eval_embedded, Embedding, LocalValue};
use crate::exactnum::field::{FieldElem, NumberField};
use crate::exactnum::padic::PadicBall;
use crate::exactnum::place::{abs_value, Place};
use crate::exactnum::primes::factor;
use crate::exactnum::rational::{format_rational, from_bigint, int, Rational};
use crate::exactnum::{embeddings, RealBall, Scalar, Verdict};

/// A point of P¹ over Q or over a number field.
#[derive(Clone, Debug, PartialEq)]
pub enum ProjPoint {
    /// Coprime integers with x0 >= 0, and x1 = 1 when x0 = 0.
    Rational { x0: BigInt, x1: BigInt },
    Algebraic { x0: FieldElem, x1: FieldElem },
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        match self {
            ProjPoint::Rational { x0, x1 } => {
                seq.serialize_element(&x0.to_string())?;
                seq.serialize_element(&x1.to_string())?;
            }
            ProjPoint::Algebraic { x0, x1 } => {
                seq.serialize_element(x0)?;
                seq.serialize_element(x1)?;
            }
        }
        seq.end()
    }
}

impl ProjPoint {
    pub fn rational(x0: &Rational, x1: &Rational) -> Result<ProjPoint> {
        if x0.is_zero() && x1.is_zero() {
            return Err(Error::InvalidInput("(0:0) is not a projective point".into()));
        }
        let l = x0.denom().lcm(x1.denom());
        let a = (x0 * from_bigint(l.clone())).to_integer();
        let b = (x1 * from_bigint(l)).to_integer();
        Ok(ProjPoint::from_integers(a, b))
    }

    pub fn from_integers(a: BigInt, b: BigInt) -> ProjPoint {
        assert!(!(a.is_zero() && b.is_zero()), "(0:0) is not a projective point");
        let g = a.gcd(&b);
        let (mut a, mut b) = (a / &g, b / &g);
        if a.is_negative() || (a.is_zero() && b.is_negative()) {
            a = -a;
            b = -b;
        }
        ProjPoint::Rational { x0: a, x1: b }
    }

    pub fn ints(a: i64, b: i64) -> ProjPoint {
        ProjPoint::from_integers(a.into(), b.into())
    }

    pub fn algebraic(x0: FieldElem, x1: FieldElem) -> Result<ProjPoint> {
        if x0.field() != x1.field() {
            return Err(Error::InvalidInput("coordinates live in different fields".into()));
        }
        if x0.vanishes() && x1.vanishes() {
            return Err(Error::InvalidInput("(0:0) is not a projective point".into()));
        }
        Ok(ProjPoint::Algebraic { x0, x1 })
    }

    /// The point (1 : α).
    pub fn affine(alpha: FieldElem) -> ProjPoint {
        let one = alpha.field().one();
        ProjPoint::Algebraic { x0: one, x1: alpha }
    }

    pub fn field(&self) -> Option<&NumberField> {
        match self {
            ProjPoint::Rational { .. } => None,
            ProjPoint::Algebraic { x0, .. } => Some(x0.field()),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ProjPoint::Rational { .. })
    }

    /// Coordinates as field elements of `k` (rational points embed diagonally).
    pub fn coords_in(&self, k: &NumberField) -> Result<(FieldElem, FieldElem)> {
        match self {
            ProjPoint::Rational { x0, x1 } => {
                Ok((k.from_rational(&from_bigint(x0.clone())), k.from_rational(&from_bigint(x1.clone()))))
            }
            ProjPoint::Algebraic { x0, x1 } => {
                if x0.field() != k {
                    return Err(Error::InvalidInput("point lives in a different field".into()));
                }
                Ok((x0.clone(), x1.clone()))
            }
        }
    }

    pub fn rational_coords(&self) -> Option<(Rational, Rational)> {
        match self {
            ProjPoint::Rational { x0, x1 } => Some((from_bigint(x0.clone()), from_bigint(x1.clone()))),
            ProjPoint::Algebraic { x0, x1 } => Some((x0.as_rational()?.clone(), x1.as_rational()?.clone())),
        }
    }

    /// x1/x0 when x0 ≠ 0, as a field element.
    pub fn affine_coordinate(&self) -> Option<FieldElem> {
        match self {
            ProjPoint::Algebraic { x0, x1 } => Some(x1.times(&x0.checked_inv()?)),
            ProjPoint::Rational { .. } => None,
        }
    }

    /// Localizes at `v`; algebraic points need an embedding at that place.
    pub fn localize(&self, emb: Option<&Embedding>, v: &Place, prec: u32) -> Result<LocalPoint> {
        match self {
            ProjPoint::Rational { x0, x1 } => {
                Ok(LocalPoint::Rational(from_bigint(x0.clone()), from_bigint(x1.clone())))
            }
            ProjPoint::Algebraic { x0, x1 } => {
                let e = emb.ok_or_else(|| Error::InvalidInput("algebraic point needs an embedding".into()))?;
                if e.place() != v {
                    return Err(Error::InvalidInput(format!(
                        "embedding at place {} used at place {v}",
                        e.place()
                    )));
                }
                match (eval_embedded(e, x0, prec)?, eval_embedded(e, x1, prec)?) {
                    (LocalValue::Complex(a), LocalValue::Complex(b)) => Ok(LocalPoint::Complex(a, b)),
                    (LocalValue::Padic(a), LocalValue::Padic(b)) => Ok(LocalPoint::Padic(a, b)),
                    _ => Err(Error::InternalMismatch("mixed local values".into())),
                }
            }
        }
    }
}

impl std::fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProjPoint::Rational { x0, x1 } => write!(f, "({x0}:{x1})"),
            ProjPoint::Algebraic { x0, x1 } => write!(f, "({x0}:{x1})"),
        }
    }
}

/// A point of P¹(C_v): exact rational coordinates or balls in C or Q_p.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum LocalPoint {
    Rational(
        #[serde(with = "crate::exactnum::rational::serde_rational")] Rational,
        #[serde(with = "crate::exactnum::rational::serde_rational")] Rational,
    ),
    Complex(ComplexBall, ComplexBall),
    Padic(PadicBall, PadicBall),
}

/// Absolute logarithmic height.
pub fn height(x: &ProjPoint, prec: u32) -> Result<RealBall> {
    match x {
        ProjPoint::Rational { x0, x1 } => {
            let n = from_bigint(x0 * x0 + x1 * x1);
            Ok(ln_rational(&n, prec).mul_q(&Rational::new(1.into(), 2.into())))
        }
        ProjPoint::Algebraic { .. } => {
            let Some(alpha) = x.affine_coordinate() else {
                return Ok(RealBall::zero(prec));
            };
            let k = alpha.field().clone();
            let q = k.degree();
            let p = alpha.primitive_minimal_polynomial();
            let d = p.len() - 1;
            let lead = from_bigint(p[d].clone());
            // (q/d) log lc(P) + Σ_σ log sqrt(1 + |σα|²), divided by q
            let wp = prec + 16;
            let mut sum = ln_rational(&lead, wp).mul_q(&Rational::new(BigInt::from(q), BigInt::from(d)));
            for e in embeddings(&k, &Place::Archimedean, wp)?.embeddings {
                let z = eval_embedded(&e, &alpha, wp)?;
                let n = z.as_complex().expect("archimedean").norm_sqr().add_q(&Rational::one());
                sum = sum.add(&n.ln()?.mul_q(&Rational::new(1.into(), 2.into())));
            }
            Ok(sum.mul_q(&Rational::new(1.into(), BigInt::from(q))).with_prec(prec))
        }
    }
}

enum Common {
    Exact(Rational, Rational, Rational, Rational),
    Complex([ComplexBall; 4]),
    Padic([PadicBall; 4]),
}

fn common(x: &LocalPoint, y: &LocalPoint, v: &Place, prec: u32) -> Result<Common> {
    use LocalPoint as L;
    let to_c = |q: &Rational| ComplexBall::from_rational(q, prec);
    let to_p = |q: &Rational| {
        let p = v.prime().expect("finite place");
        PadicBall::from_rational(p, q, prec as i64)
    };
    let mismatch = || Error::InvalidInput(format!("local point does not live over the place {v}"));
    Ok(match (x, y) {
        (L::Rational(a, b), L::Rational(c, d)) => Common::Exact(a.clone(), b.clone(), c.clone(), d.clone()),
        (L::Complex(a, b), L::Complex(c, d)) if v.is_archimedean() => {
            Common::Complex([a.clone(), b.clone(), c.clone(), d.clone()])
        }
        (L::Complex(a, b), L::Rational(c, d)) if v.is_archimedean() => {
            Common::Complex([a.clone(), b.clone(), to_c(c), to_c(d)])
        }
        (L::Rational(a, b), L::Complex(c, d)) if v.is_archimedean() => {
            Common::Complex([to_c(a), to_c(b), c.clone(), d.clone()])
        }
        (L::Padic(a, b), L::Padic(c, d)) if !v.is_archimedean() => {
            Common::Padic([a.clone(), b.clone(), c.clone(), d.clone()])
        }
        (L::Padic(a, b), L::Rational(c, d)) if !v.is_archimedean() => {
            Common::Padic([a.clone(), b.clone(), to_p(c), to_p(d)])
        }
        (L::Rational(a, b), L::Padic(c, d)) if !v.is_archimedean() => {
            Common::Padic([to_p(a), to_p(b), c.clone(), d.clone()])
        }
        _ => return Err(mismatch()),
    })
}

fn padic_norm(a: &PadicBall, b: &PadicBall) -> Result<Rational> {
    let (na, nb) = (a.abs()?, b.abs()?);
    Ok(if na > nb { na } else { nb })
}

/// Square of the v-adic distance at the archimedean place, and the distance
/// itself at finite places (where it is an exact rational).
fn distance_parts(x: &LocalPoint, y: &LocalPoint, v: &Place, prec: u32) -> Result<RealBall> {
    match common(x, y, v, prec)? {
        Common::Exact(a, b, c, d) => {
            let cross = &a * &d - &b * &c;
            if v.is_archimedean() {
                let sq = &cross * &cross / ((&a * &a + &b * &b) * (&c * &c + &d * &d));
                Ok(RealBall::exact(sq, prec))
            } else {
                let nx = abs_value(v, &a).max(abs_value(v, &b));
                let ny = abs_value(v, &c).max(abs_value(v, &d));
                let dist = abs_value(v, &cross) / (nx * ny);
                Ok(RealBall::exact(&dist * &dist, prec))
            }
        }
        Common::Complex([a, b, c, d]) => {
            let cross = a.mul(&d).sub(&b.mul(&c));
            let den = a.norm_sqr().add(&b.norm_sqr()).mul(&c.norm_sqr().add(&d.norm_sqr()));
            Ok(cross.norm_sqr().div(&den)?.clamp(&Rational::zero(), &Rational::one()))
        }
        Common::Padic([a, b, c, d]) => {
            let cross = a.mul(&d).sub(&b.mul(&c));
            let nc = cross.abs()?;
            let dist = nc / (padic_norm(&a, &b)? * padic_norm(&c, &d)?);
            Ok(RealBall::exact(&dist * &dist, prec))
        }
    }
}

/// d_v(x, y) = |x0 y1 − x1 y0|_v / (‖x‖_v ‖y‖_v), a value in [0, 1].
pub fn distance_v(x: &LocalPoint, y: &LocalPoint, v: &Place, prec: u32) -> Result<RealBall> {
    distance_parts(x, y, v, prec)?.sqrt()
}

/// m_v = −log d_v.
pub fn proximity_v(x: &LocalPoint, y: &LocalPoint, v: &Place, prec: u32) -> Result<RealBall> {
    let sq = distance_parts(x, y, v, prec)?;
    if sq.exact_value().is_some_and(Zero::is_zero) {
        return Err(Error::DistanceZero);
    }
    if let Some(q) = sq.exact_value() {
        return Ok(ln_rational(q, prec).mul_q(&Rational::new((-1).into(), 2.into())));
    }
    Ok(sq.ln()?.mul_q(&Rational::new((-1).into(), 2.into())))
}

/// Σ_v −log d_v(x, a_v) over the listed (target, place) pairs.
pub fn proximity(x: &ProjPoint, targets: &[(LocalPoint, Place)], prec: u32) -> Result<RealBall> {
    let mut sum = RealBall::zero(prec);
    for (a, v) in targets {
        let xl = x.localize(None, v, prec)?;
        sum = sum.add(&proximity_v(&xl, a, v, prec)?);
    }
    Ok(sum)
}

/// Exact audit of Σ_v m_v(x, y) = h(x) + h(y) for two distinct rational
/// points: only ∞ and the primes dividing the cross term contribute, and the
/// identity becomes an equality of rationals after exponentiating.
#[derive(Clone, Debug, Serialize)]
pub struct LiouvilleReport {
    pub check: &'static str,
    pub x: ProjPoint,
    pub y: ProjPoint,
    /// Places with d_v < 1 and the exact value of d_v² there.
    pub contributing: Vec<(Place, String)>,
    /// ∏_v d_v² over the contributing places.
    pub distance_product: String,
    /// exp(−2(h(x) + h(y))) = 1 / (‖x‖²‖y‖²).
    pub height_term: String,
    pub verdict: Verdict,
}

impl LiouvilleReport {
    /// Both sides as balls: Σ m_v and h(x) + h(y).
    pub fn sides(&self, prec: u32) -> Result<(RealBall, RealBall)> {
        let mut lhs = RealBall::zero(prec);
        for (_, sq) in &self.contributing {
            let q = crate::exactnum::rational::parse_rational(sq)?;
            lhs = lhs.add(&ln_rational(&q, prec).mul_q(&Rational::new((-1).into(), 2.into())));
        }
        let rhs = height(&self.x, prec)?.add(&height(&self.y, prec)?);
        Ok((lhs, rhs))
    }
}

pub fn liouville_check(x: &ProjPoint, y: &ProjPoint) -> Result<LiouvilleReport> {
    let (ProjPoint::Rational { x0, x1 }, ProjPoint::Rational { x0: y0, x1: y1 }) = (x, y) else {
        return Err(Error::InvalidInput("the exact audit needs two rational points".into()));
    };
    if x == y {
        return Err(Error::EqualPoints);
    }
    let cross = x0 * y1 - x1 * y0;
    let (lx, ly) = (LocalPoint::Rational(from_bigint(x0.clone()), from_bigint(x1.clone())), LocalPoint::Rational(from_bigint(y0.clone()), from_bigint(y1.clone())));
    let mut places = vec![Place::Archimedean];
    places.extend(factor(&cross.abs()).into_iter().map(|(p, _)| Place::Finite(p)));
    let mut contributing = Vec::new();
    let mut product = Rational::one();
    for v in places {
        let sq = distance_parts(&lx, &ly, &v, 64)?.exact_value().cloned().expect("exact for rational points");
        if !sq.is_one() {
            product *= &sq;
            contributing.push((v, format_rational(&sq)));
        }
    }
    let nx = from_bigint(x0 * x0 + x1 * x1);
    let ny = from_bigint(y0 * y0 + y1 * y1);
    let height_term = int(1) / (nx * ny);
    Ok(LiouvilleReport {
        check: "sum of proximities equals sum of heights for distinct rational points",
        x: x.clone(),
        y: y.clone(),
        contributing,
        distance_product: format_rational(&product),
        height_term: format_rational(&height_term),
        verdict: Verdict::from_bool(product == height_term),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;
    use proptest::prelude::*;

    fn sqrt2() -> NumberField {
        NumberField::from_i64(&[-2, 0, 1]).unwrap()
    }

    fn local(p: &ProjPoint) -> LocalPoint {
        p.localize(None, &Place::Archimedean, 64).unwrap()
    }

    #[test]
    fn heights_of_small_points() {
        assert!(height(&ProjPoint::ints(1, 0), 64).unwrap().contains(&int(0)));
        let h = height(&ProjPoint::ints(1, 2), 64).unwrap();
        // log √5 = 0.80471895621705018730…
        assert!(h.lo() < rat(8047189563, 10000000000) && h.hi() > rat(8047189562, 10000000000));
        let k = sqrt2();
        let h = height(&ProjPoint::affine(k.theta()), 64).unwrap();
        // log √3 = 0.54930614433405484570…
        assert!(h.lo() < rat(549306144335, 1000000000000) && h.hi() > rat(549306144334, 1000000000000));
    }

    #[test]
    fn distances() {
        let d = distance_v(&local(&ProjPoint::ints(1, 0)), &local(&ProjPoint::ints(0, 1)), &Place::Archimedean, 64).unwrap();
        assert_eq!(d.exact_value(), Some(&int(1)));
        let two = Place::finite(2).unwrap();
        let d = distance_v(&local(&ProjPoint::ints(1, 1)), &local(&ProjPoint::ints(1, 3)), &two, 64).unwrap();
        assert_eq!(d.exact_value(), Some(&rat(1, 2)));
        let d = distance_v(&local(&ProjPoint::ints(1, 1)), &local(&ProjPoint::ints(1, 2)), &Place::Archimedean, 64).unwrap();
        assert!(d.sqr().contains(&rat(1, 10)));
    }

    #[test]
    fn proximity_examples() {
        let x = ProjPoint::ints(1, 1);
        assert!(proximity(&x, &[], 64).unwrap().contains(&int(0)));
        let a = local(&ProjPoint::ints(1, 3));
        let m = proximity(&x, &[(a.clone(), Place::finite(2).unwrap()), (a, Place::Archimedean)], 64).unwrap();
        // log 2 + ½ log 5 = 1.49786613677699…
        assert!(m.lo() < rat(1497866136777, 1000000000000) && m.hi() > rat(1497866136776, 1000000000000));
        let k = sqrt2();
        let emb = &embeddings(&k, &Place::Archimedean, 64).unwrap().embeddings[1];
        let a = ProjPoint::affine(k.theta()).localize(Some(emb), &Place::Archimedean, 64).unwrap();
        let m = proximity(&ProjPoint::ints(3, 2), &[(a, Place::Archimedean)], 64).unwrap();
        // −log(|3√2 − 2| / (√13 √3)) = 1.0241267733508676…
        assert!(m.lo() > rat(10241267733, 10000000000) && m.hi() < rat(10241267734, 10000000000));
        assert_eq!(
            proximity(&ProjPoint::ints(1, 1), &[(local(&ProjPoint::ints(2, 2)), Place::Archimedean)], 64),
            Err(Error::DistanceZero)
        );
    }

    #[test]
    fn padic_distance_to_algebraic_point() {
        let k = sqrt2();
        let seven = Place::finite(7).unwrap();
        let embs = embeddings(&k, &seven, 64).unwrap();
        let a = ProjPoint::affine(k.theta());
        for e in &embs.embeddings {
            let la = a.localize(Some(e), &seven, 64).unwrap();
            // θ ≡ ±3 mod 7, so (1:3) is 7-adically close to exactly one embedding
            let d = distance_v(&local(&ProjPoint::ints(1, 3)), &la, &seven, 64).unwrap();
            let v = d.exact_value().unwrap().clone();
            assert!(v == int(1) || v <= rat(1, 7));
        }
        assert!(a.localize(Some(&embs.embeddings[0]), &Place::Archimedean, 64).is_err());
    }

    #[test]
    fn liouville_examples() {
        for (x, y) in [((1, 0), (0, 1)), ((1, 1), (1, 2)), ((3, 7), (2, 5)), ((1, 1), (1, 3))] {
            let r = liouville_check(&ProjPoint::ints(x.0, x.1), &ProjPoint::ints(y.0, y.1)).unwrap();
            assert!(r.verdict.is_true(), "{r:?}");
            let (l, h) = r.sides(64).unwrap();
            assert!(l.sub(&h).contains_zero());
        }
        assert_eq!(liouville_check(&ProjPoint::ints(1, 2), &ProjPoint::ints(2, 4)).unwrap_err(), Error::EqualPoints);
    }

    proptest! {
        #[test]
        fn distance_is_symmetric_and_bounded(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            prop_assume!((a, b) != (0, 0) && (c, d) != (0, 0));
            let (x, y) = (local(&ProjPoint::ints(a, b)), local(&ProjPoint::ints(c, d)));
            for v in [Place::Archimedean, Place::finite(p).unwrap()] {
                let dxy = distance_v(&x, &y, &v, 64).unwrap();
                let dyx = distance_v(&y, &x, &v, 64).unwrap();
                prop_assert_eq!(&dxy, &dyx);
                prop_assert!(dxy.hi() >= int(0));
                prop_assert!(dxy.lo() <= int(1));
                prop_assert!(distance_v(&x, &x, &v, 64).unwrap().contains_zero());
            }
        }

        #[test]
        fn height_ignores_rescaling(a in -200i64..200, b in -200i64..200, n in 1i64..40, m in 1i64..40) {
            prop_assume!((a, b) != (0, 0));
            let x = ProjPoint::ints(a, b);
            let lambda = rat(n, m);
            let y = ProjPoint::rational(&(int(a) * &lambda), &(int(b) * &lambda)).unwrap();
            prop_assert_eq!(&x, &y);
            let k = sqrt2();
            let scaled = ProjPoint::algebraic(k.from_rational(&lambda), k.theta().times(&k.from_rational(&lambda))).unwrap();
            let h1 = height(&scaled, 64).unwrap();
            let h2 = height(&ProjPoint::affine(k.theta()), 64).unwrap();
            prop_assert!(h1.sub(&h2).contains_zero());
        }
    }
}
