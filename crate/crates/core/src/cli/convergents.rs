//! Convergents of a real quadratic irrationality, used to build approximation
//! instances with small distance at the archimedean place.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::heights::ProjPoint;
use crate::{Error, Result};

/// The larger root α of a quadratic polynomial and its first convergents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergentCorpus {
    /// Constant term first, leading coefficient positive.
    #[serde(serialize_with = "ser_bigs")]
    pub minpoly: Vec<BigInt>,
    /// α = (P₀ + √D)/Q₀ with Q₀ | D − P₀².
    #[serde(serialize_with = "ser_bigs")]
    pub surd: Vec<BigInt>,
    #[serde(serialize_with = "ser_bigs")]
    pub partial_quotients: Vec<BigInt>,
    /// pᵢ/qᵢ as "p/q" strings.
    #[serde(serialize_with = "ser_fracs")]
    pub convergents: Vec<(BigInt, BigInt)>,
}

fn ser_bigs<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.to_string()))
}

fn ser_fracs<S: serde::Serializer>(v: &[(BigInt, BigInt)], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(p, q)| format!("{p}/{q}")))
}

impl ConvergentCorpus {
    /// pᵢ/qᵢ as the points (qᵢ : pᵢ), matching α = (1 : α).
    pub fn points(&self) -> Vec<ProjPoint> {
        self.convergents.iter().map(|(p, q)| ProjPoint::from_integers(q.clone(), p.clone())).collect()
    }
}

/// ⌊(P + √D)/Q⌋ for non-square D > 0 and Q ≠ 0.
fn floor_surd(p: &BigInt, d: &BigInt, q: &BigInt) -> BigInt {
    let s = d.sqrt();
    if q.is_positive() {
        (p + &s).div_floor(q)
    } else {
        // √D ∈ (s, s + 1), so −P − √D lies strictly between −P − s − 1 and −P − s
        (-p - &s - BigInt::one()).div_floor(&-q)
    }
}

/// First `count` convergents of the larger real root of `minpoly`, which
/// must be an irreducible quadratic with that root positive.
pub fn generate_convergents(minpoly: &[BigInt], count: usize) -> Result<ConvergentCorpus> {
    if minpoly.len() != 3 || minpoly[2].is_zero() {
        return Err(Error::NotRealQuadratic);
    }
    let sign = if minpoly[2].is_negative() { -BigInt::one() } else { BigInt::one() };
    let f: Vec<BigInt> = minpoly.iter().map(|c| c * &sign).collect();
    let (c, b, a) = (&f[0], &f[1], &f[2]);
    let d = b * b - BigInt::from(4) * a * c;
    if !d.is_positive() || d.sqrt().pow(2) == d {
        return Err(Error::NotRealQuadratic);
    }
    // a non-square D also makes the polynomial irreducible; α = (−b + √D)/(2a) > 0 ⇔ √D > b
    if b.is_positive() && b * b >= d {
        return Err(Error::NotRealQuadratic);
    }
    let (mut p, mut q) = (-b.clone(), BigInt::from(2) * a);
    let surd = vec![p.clone(), d.clone(), q.clone()];
    let mut quotients = Vec::with_capacity(count);
    let mut convergents = Vec::with_capacity(count);
    let (mut h1, mut h2) = (BigInt::one(), BigInt::zero());
    let (mut k1, mut k2) = (BigInt::zero(), BigInt::one());
    for _ in 0..count {
        let ai = floor_surd(&p, &d, &q);
        let h = &ai * &h1 + &h2;
        let k = &ai * &k1 + &k2;
        (h2, h1) = (h1, h.clone());
        (k2, k1) = (k1, k.clone());
        convergents.push((h, k));
        // 1/((P + √D)/Q − a) = (P' + √D)/Q' with P' = aQ − P and Q' = (D − P'²)/Q
        let pn = &ai * &q - &p;
        let qn = (&d - &pn * &pn) / &q;
        debug_assert!(!qn.is_zero());
        quotients.push(ai);
        p = pn;
        q = qn;
    }
    Ok(ConvergentCorpus { minpoly: f, surd, partial_quotients: quotients, convergents })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn fracs(c: &ConvergentCorpus) -> Vec<String> {
        c.convergents.iter().map(|(p, q)| format!("{p}/{q}")).collect()
    }

    #[test]
    fn sqrt_two_and_golden_ratio() {
        let c = generate_convergents(&big(&[-2, 0, 1]), 5).unwrap();
        assert_eq!(fracs(&c), ["1/1", "3/2", "7/5", "17/12", "41/29"]);
        let c = generate_convergents(&big(&[-1, -1, 1]), 5).unwrap();
        assert_eq!(fracs(&c), ["1/1", "2/1", "3/2", "5/3", "8/5"]);
        // sign of the leading coefficient does not matter
        let c = generate_convergents(&big(&[2, 0, -1]), 3).unwrap();
        assert_eq!(fracs(&c), ["1/1", "3/2", "7/5"]);
    }

    #[test]
    fn rejects_non_real_quadratics() {
        for f in [&[1, 0, 1][..], &[-4, 0, 1], &[2, 3, 1], &[-2, 0, 0, 1], &[3, 4, 1]] {
            assert_eq!(generate_convergents(&big(f), 3), Err(Error::NotRealQuadratic), "{f:?}");
        }
        // x² + 3x + 1 has both roots negative
        assert_eq!(generate_convergents(&big(&[1, 3, 1]), 3), Err(Error::NotRealQuadratic));
    }

    proptest! {
        #[test]
        fn convergents_are_unimodular_and_bracket_the_root(c in -50i64..50, b in -20i64..20, a in 1i64..6) {
            let f = big(&[c, b, a]);
            let disc = b * b - 4 * a * c;
            prop_assume!(disc > 0 && (disc as f64).sqrt().round().powi(2) != disc as f64);
            let root = (-(b as f64) + (disc as f64).sqrt()) / (2.0 * a as f64);
            prop_assume!(root > 0.0);
            let corpus = generate_convergents(&f, 12).unwrap();
            for w in corpus.convergents.windows(2) {
                let det = &w[0].0 * &w[1].1 - &w[1].0 * &w[0].1;
                prop_assert_eq!(det.abs(), BigInt::one());
            }
            // each convergent after the first lies within 1/q² of α
            for (p, q) in corpus.convergents.iter().skip(1) {
                let (p, q) = (p.to_string().parse::<f64>().unwrap(), q.to_string().parse::<f64>().unwrap());
                prop_assert!((p / q - root).abs() <= 1.0 / (q * q) + 1e-9);
            }
        }
    }
}
