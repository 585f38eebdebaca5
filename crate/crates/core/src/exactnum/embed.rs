//! Embeddings of a number field into C and into Q_p, with certified root
//! isolation and on-demand refinement.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::ball::RealBall;
use super::complex::ComplexBall;
use super::field::{FieldElem, NumberField};
use super::padic::PadicBall;
use super::place::Place;
use super::poly::{self, factor_degrees_mod_p, hensel_lift, roots_mod_p, squarefree_mod_p};
use super::primes::to_u64;
use super::rational::{int, mul_pow2, root_upper, to_f64, Rational};
use crate::error::{Error, Result};

/// A point of C_v: complex ball at the archimedean place, p-adic ball otherwise.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum LocalValue {
    Complex(ComplexBall),
    Padic(PadicBall),
}

impl LocalValue {
    pub fn as_complex(&self) -> Option<&ComplexBall> {
        match self {
            LocalValue::Complex(z) => Some(z),
            LocalValue::Padic(_) => None,
        }
    }

    pub fn as_padic(&self) -> Option<&PadicBall> {
        match self {
            LocalValue::Padic(z) => Some(z),
            LocalValue::Complex(_) => None,
        }
    }
}

/// One field embedding σ: K′ → C_v, stored as a ball isolating the image of θ.
#[derive(Clone, Debug, Serialize)]
pub struct Embedding {
    #[serde(skip)]
    field: NumberField,
    place: Place,
    index: usize,
    root: LocalValue,
    /// Bits for complex roots, p-adic digits for finite places.
    accuracy: u32,
    #[serde(skip)]
    disk: Option<(Rational, Rational, Rational)>,
}

/// All embeddings at one place plus the local degrees of the blocks of the
/// factorization of the defining polynomial over the completion.
#[derive(Clone, Debug, Serialize)]
pub struct LocalEmbeddings {
    pub embeddings: Vec<Embedding>,
    pub blocks: Vec<usize>,
}

impl Embedding {
    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn place(&self) -> &Place {
        &self.place
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn root(&self) -> &LocalValue {
        &self.root
    }

    pub fn is_real(&self) -> bool {
        matches!(&self.root, LocalValue::Complex(z) if z.is_real())
    }

    /// Same embedding with the root known to at least `prec` bits.
    pub fn refine(&self, prec: u32) -> Result<Embedding> {
        if prec <= self.accuracy {
            return Ok(self.clone());
        }
        match (&self.root, &self.place) {
            (LocalValue::Complex(_), _) => {
                let (re, im, rad) = self.disk.clone().expect("complex embeddings carry their disk");
                let f = self.field.minpoly_rational();
                let real = im.is_zero() && self.is_real();
                let (nre, nim) = newton(&f, (re.clone(), im.clone()), prec, real)?;
                let nrad = certify_radius(&f, &nre, &nim, prec)?;
                // the new disk must sit inside the old one, so it isolates the same root
                let d2 = (&nre - &re) * (&nre - &re) + (&nim - &im) * (&nim - &im);
                let slack = &rad - &nrad;
                if slack.is_negative() || d2 > &slack * &slack {
                    return Err(Error::PrecisionExhausted("root refinement left the isolating disk".into()));
                }
                Ok(Embedding {
                    field: self.field.clone(),
                    place: self.place.clone(),
                    index: self.index,
                    root: LocalValue::Complex(disk_ball(&nre, &nim, &nrad, real, prec)),
                    accuracy: prec,
                    disk: Some((nre, nim, nrad)),
                })
            }
            (LocalValue::Padic(z), Place::Finite(p)) => {
                let digits = padic_digits(p, prec);
                let r0 = to_u64(&z.residue(1)).expect("residue fits");
                let lifted = hensel_lift(self.field.minpoly(), r0, p, digits);
                Ok(Embedding {
                    field: self.field.clone(),
                    place: self.place.clone(),
                    index: self.index,
                    root: LocalValue::Padic(PadicBall::integer_mod(p, lifted, digits)),
                    accuracy: prec,
                    disk: None,
                })
            }
            _ => unreachable!("p-adic root at the archimedean place"),
        }
    }

    /// Image of a field element; see [`eval_embedded`].
    pub fn eval(&self, x: &FieldElem, prec: u32) -> Result<LocalValue> {
        eval_embedded(self, x, prec)
    }
}

fn padic_digits(p: &BigInt, prec: u32) -> i64 {
    (prec as f64 / (p.bits() as f64 - 1.0).max(1.0)).ceil() as i64 + 4
}

/// Every embedding of `field` at `v`. Archimedean places list all complex
/// roots (conjugates both present, real roots first). Finite places list the
/// roots in Q_p; residue-degree blocks without Q_p roots appear only in
/// `blocks`.
pub fn embeddings(field: &NumberField, v: &Place, prec: u32) -> Result<LocalEmbeddings> {
    if prec < 32 {
        return Err(Error::InvalidInput(format!("precision {prec} below the minimum of 32 bits")));
    }
    match v {
        Place::Archimedean => {
            let f = field.minpoly_rational();
            let mut attempt = prec;
            let (roots, disks) = loop {
                match complex_roots_with_disks(&f, attempt) {
                    Ok(r) => break r,
                    Err(Error::PrecisionExhausted(_)) if attempt < 16 * prec => attempt *= 2,
                    Err(e) => return Err(e),
                }
            };
            let blocks = roots.iter().map(|z| if z.is_real() { 1 } else { 2 }).collect::<Vec<_>>();
            let nreal = blocks.iter().filter(|&&b| b == 1).count();
            let blocks = std::iter::repeat_n(1, nreal).chain(std::iter::repeat_n(2, (roots.len() - nreal) / 2)).collect();
            let embeddings = roots
                .into_iter()
                .zip(disks)
                .enumerate()
                .map(|(index, (z, disk))| Embedding {
                    field: field.clone(),
                    place: v.clone(),
                    index,
                    root: LocalValue::Complex(z),
                    accuracy: attempt,
                    disk: Some(disk),
                })
                .collect();
            Ok(LocalEmbeddings { embeddings, blocks })
        }
        Place::Finite(p) => {
            let pu = to_u64(p).ok_or_else(|| Error::InvalidInput(format!("prime {p} too large")))?;
            if !squarefree_mod_p(field.minpoly(), pu) {
                return Err(Error::RamifiedUnsupported { p: p.to_string() });
            }
            let blocks = factor_degrees_mod_p(field.minpoly(), pu);
            let digits = padic_digits(p, prec);
            let embeddings = roots_mod_p(field.minpoly(), pu)?
                .into_iter()
                .enumerate()
                .map(|(index, r0)| {
                    let lifted = hensel_lift(field.minpoly(), r0, p, digits);
                    Embedding {
                        field: field.clone(),
                        place: v.clone(),
                        index,
                        root: LocalValue::Padic(PadicBall::integer_mod(p, lifted, digits)),
                        accuracy: prec,
                        disk: None,
                    }
                })
                .collect();
            Ok(LocalEmbeddings { embeddings, blocks })
        }
    }
}

/// σ(x) as a ball of radius at most about 2^(8 - prec), refining the root
/// as needed.
pub fn eval_embedded(e: &Embedding, x: &FieldElem, prec: u32) -> Result<LocalValue> {
    if x.field() != &e.field {
        return Err(Error::InvalidInput("element and embedding belong to different fields".into()));
    }
    match e.place() {
        Place::Archimedean => {
            if let Some(q) = x.as_rational() {
                return Ok(LocalValue::Complex(ComplexBall::from_rational(q, prec)));
            }
            let target = mul_pow2(&Rational::one(), 8 - prec as i64);
            let mut wp = prec.max(e.accuracy);
            let limit = 16 * prec + 1024;
            loop {
                let emb = e.refine(wp)?;
                let root = emb.root.as_complex().expect("archimedean root").clone();
                let val = poly::eval_complex(x.coords(), &root);
                if *val.re.rad() <= target && *val.im.rad() <= target {
                    return Ok(LocalValue::Complex(val));
                }
                if wp >= limit {
                    return Err(Error::PrecisionExhausted(format!(
                        "embedded value still wider than 2^{} at {wp} bits",
                        8 - prec as i64
                    )));
                }
                wp *= 2;
            }
        }
        Place::Finite(p) => {
            let digits = padic_digits(p, prec);
            let emb = e.refine(prec)?;
            let root = emb.root.as_padic().expect("p-adic root");
            Ok(LocalValue::Padic(poly::eval_padic(x.coords(), root, digits)))
        }
    }
}

// ---- archimedean root isolation ----

fn aberth(f: &[f64]) -> Vec<Complex64> {
    let d = f.len() - 1;
    let lead = f[d];
    let bound = 1.0 + f[..d].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> =
        (0..d).map(|k| Complex64::from_polar(bound * 0.7, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / d as f64)).collect();
    let df: Vec<f64> = f.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
    let ev = |p: &[f64], x: Complex64| p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c);
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let ratio = ev(f, z[i]) / ev(&df, z[i]);
            let s: Complex64 = (0..d).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn round_to(x: &Rational, bits: i64) -> Rational {
    mul_pow2(&mul_pow2(x, bits).round(), -bits)
}

type Cq = (Rational, Rational);

fn horner_c(f: &[Rational], z: &Cq) -> Cq {
    let mut acc = (Rational::zero(), Rational::zero());
    for c in f.iter().rev() {
        let re = &acc.0 * &z.0 - &acc.1 * &z.1 + c;
        let im = &acc.0 * &z.1 + &acc.1 * &z.0;
        acc = (re, im);
    }
    acc
}

/// Newton iteration in exact complex rationals, rounding the iterate to a
/// dyadic grid of `prec + 16` bits after each step.
fn newton(f: &[Rational], mut z: Cq, prec: u32, real: bool) -> Result<Cq> {
    let df = poly::derivative(f);
    let bits = prec as i64 + 16;
    let tol = mul_pow2(&Rational::one(), -2 * (prec as i64 + 8));
    for _ in 0..200 {
        let (fr, fi) = horner_c(f, &z);
        let (dr, di) = horner_c(&df, &z);
        let den = &dr * &dr + &di * &di;
        if den.is_zero() {
            return Err(Error::PrecisionExhausted("Newton step hit a critical point".into()));
        }
        let sr = (&fr * &dr + &fi * &di) / &den;
        let si = (&fi * &dr - &fr * &di) / &den;
        let size = &sr * &sr + &si * &si;
        z = (round_to(&(&z.0 - &sr), bits), if real { Rational::zero() } else { round_to(&(&z.1 - &si), bits) });
        if size <= tol {
            return Ok(z);
        }
    }
    Err(Error::PrecisionExhausted("Newton iteration did not converge".into()))
}

/// Radius `d |f(z)| / |f'(z)|` of a disk around z certified to contain a root.
fn certify_radius(f: &[Rational], re: &Rational, im: &Rational, prec: u32) -> Result<Rational> {
    let d = f.len() - 1;
    let wp = prec + 32;
    let z = ComplexBall::new(RealBall::exact(re.clone(), wp), RealBall::exact(im.clone(), wp));
    let fz = poly::eval_complex(f, &z).norm_sqr();
    let dfz = poly::eval_complex(&poly::derivative(f), &z).norm_sqr();
    let lo = dfz.lo();
    if !lo.is_positive() {
        return Err(Error::PrecisionExhausted("derivative not certified nonzero at root".into()));
    }
    let ratio = fz.hi() / lo * int((d * d) as i64);
    let s = (prec as i64 + 8 - super::rational::approx_log2(&ratio) / 2).max(8) as u64;
    Ok(root_upper(&ratio, 2, s) + mul_pow2(&Rational::one(), -(prec as i64 + 8)))
}

fn disk_ball(re: &Rational, im: &Rational, rad: &Rational, real: bool, prec: u32) -> ComplexBall {
    let r = RealBall::new(re.clone(), rad.clone(), prec);
    if real {
        ComplexBall::from_real(r)
    } else {
        ComplexBall::new(r, RealBall::new(im.clone(), rad.clone(), prec))
    }
}

type Disk = (Rational, Rational, Rational);

fn complex_roots_with_disks(f: &[Rational], prec: u32) -> Result<(Vec<ComplexBall>, Vec<Disk>)> {
    let d = f.len() - 1;
    let ff: Vec<f64> = f.iter().map(to_f64).collect();
    let seeds = aberth(&ff);
    let mut found: Vec<(Rational, Rational, Rational, bool)> = Vec::with_capacity(d);
    for s in seeds {
        let real = s.im.abs() < 1e-9 * (1.0 + s.re.abs());
        let z0 = (
            Rational::from_float(s.re).unwrap_or_default(),
            if real { Rational::zero() } else { Rational::from_float(s.im).unwrap_or_default() },
        );
        let z = newton(f, z0, prec, real)?;
        let rad = certify_radius(f, &z.0, &z.1, prec)?;
        found.push((z.0, z.1, rad, real));
    }
    for i in 0..d {
        for j in i + 1..d {
            let (a, b) = (&found[i], &found[j]);
            let dist2 = (&a.0 - &b.0) * (&a.0 - &b.0) + (&a.1 - &b.1) * (&a.1 - &b.1);
            let sum = &a.2 + &b.2;
            if dist2 <= &sum * &sum {
                return Err(Error::PrecisionExhausted(format!("root disks {i} and {j} overlap at {prec} bits")));
            }
        }
    }
    // real roots first in increasing order, then complex roots by (re, im)
    found.sort_by(|a, b| b.3.cmp(&a.3).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let balls = found.iter().map(|(re, im, r, real)| disk_ball(re, im, r, *real, prec)).collect();
    let disks = found.into_iter().map(|(re, im, r, _)| (re, im, r)).collect();
    Ok((balls, disks))
}

/// Certified isolating balls for all complex roots of a squarefree rational
/// polynomial. Real roots carry an exactly-zero imaginary part.
pub fn complex_roots(f: &[Rational], prec: u32) -> Result<Vec<ComplexBall>> {
    complex_roots_with_disks(f, prec).map(|(b, _)| b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;
    use crate::exactnum::Scalar;

    fn sqrt2() -> NumberField {
        NumberField::from_i64(&[-2, 0, 1]).unwrap()
    }

    #[test]
    fn archimedean_roots_of_x2_minus_2() {
        let e = embeddings(&sqrt2(), &Place::Archimedean, 64).unwrap();
        assert_eq!(e.embeddings.len(), 2);
        assert_eq!(e.blocks, vec![1, 1]);
        let r0 = e.embeddings[0].root().as_complex().unwrap();
        assert!(r0.is_real());
        assert!(r0.re.contains(&rat(-14142135623730951, 10000000000000000)) || r0.re.lo() < rat(-141421356, 100000000));
        let r1 = e.embeddings[1].root().as_complex().unwrap();
        assert!(r1.re.lo() > rat(141421356, 100000000) && r1.re.hi() < rat(141421357, 100000000));
    }

    #[test]
    fn complex_pairs_are_listed() {
        let k = NumberField::from_i64(&[1, 0, 0, 0, 1]).unwrap();
        let e = embeddings(&k, &Place::Archimedean, 64).unwrap();
        assert_eq!(e.embeddings.len(), 4);
        assert_eq!(e.blocks, vec![2, 2]);
        assert!(e.embeddings.iter().all(|x| !x.is_real()));
    }

    #[test]
    fn padic_embeddings() {
        let k = sqrt2();
        let e7 = embeddings(&k, &Place::finite(7).unwrap(), 64).unwrap();
        assert_eq!(e7.embeddings.len(), 2);
        let e5 = embeddings(&k, &Place::finite(5).unwrap(), 64).unwrap();
        assert!(e5.embeddings.is_empty());
        assert_eq!(e5.blocks, vec![2]);
        assert!(matches!(
            embeddings(&k, &Place::finite(2).unwrap(), 64),
            Err(Error::RamifiedUnsupported { .. })
        ));
        // theta^2 = 2 in Z_7
        let t2 = Scalar::times(&k.theta(), &k.theta());
        for emb in &e7.embeddings {
            let v = eval_embedded(emb, &t2, 64).unwrap();
            let pb = v.as_padic().unwrap();
            assert_eq!(pb.residue(20), BigInt::from(2));
        }
    }

    #[test]
    fn evaluation_refines() {
        let k = sqrt2();
        let e = embeddings(&k, &Place::Archimedean, 64).unwrap();
        let v = eval_embedded(&e.embeddings[1], &k.theta(), 256).unwrap();
        let z = v.as_complex().unwrap();
        assert!(z.re.rad_log2().unwrap_or(-1000) < -240);
        let sq = z.re.sqr();
        assert!(sq.contains(&int(2)));
        let c = eval_embedded(&e.embeddings[0], &k.from_rational(&rat(3, 2)), 64).unwrap();
        assert!(c.as_complex().unwrap().re.is_exact());
    }
}
