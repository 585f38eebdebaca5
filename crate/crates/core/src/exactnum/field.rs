//! Number fields Q(θ) given by a monic irreducible integer polynomial, and
//! their elements in the power basis of θ.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::ball::RealBall;
use super::complex::ComplexBall;
use super::embed::complex_roots;
use super::linalg::{nullspace, solve, transpose};
use super::poly::{self, factor_degrees_mod_p, squarefree_mod_p};
use super::primes::primes_below;
use super::rational::{format_rational, from_bigint, Rational};
use super::Scalar;
use crate::error::{Error, Result};

pub const MAX_FIELD_DEGREE: usize = 8;

#[derive(Debug)]
struct FieldData {
    minpoly: Vec<BigInt>,
}

/// Cheap-to-clone handle; two handles are equal when their defining
/// polynomials are equal.
#[derive(Clone, Debug)]
pub struct NumberField(Arc<FieldData>);

impl PartialEq for NumberField {
    fn eq(&self, o: &NumberField) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || self.0.minpoly == o.0.minpoly
    }
}

impl Eq for NumberField {}

impl NumberField {
    /// Checks monic, degree in [2, 8] and irreducibility over Q.
    pub fn new(minpoly: Vec<BigInt>) -> Result<NumberField> {
        let minpoly = poly::trim(minpoly);
        let d = minpoly.len().saturating_sub(1);
        if d < 2 {
            return Err(Error::InvalidInput(format!("field polynomial must have degree >= 2, got {d}")));
        }
        if d > MAX_FIELD_DEGREE {
            return Err(Error::InvalidInput(format!("field degree {d} exceeds {MAX_FIELD_DEGREE}")));
        }
        if !minpoly[d].is_one() {
            return Err(Error::InvalidInput("field polynomial must be monic".into()));
        }
        check_irreducible(&minpoly)?;
        Ok(NumberField(Arc::new(FieldData { minpoly })))
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<NumberField> {
        NumberField::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.minpoly.len() - 1
    }

    pub fn minpoly(&self) -> &[BigInt] {
        &self.0.minpoly
    }

    pub fn minpoly_rational(&self) -> Vec<Rational> {
        poly::to_rational(&self.0.minpoly)
    }

    pub fn elem(&self, coords: Vec<Rational>) -> Result<FieldElem> {
        if coords.len() != self.degree() {
            return Err(Error::InvalidInput(format!(
                "field element needs {} coordinates, got {}",
                self.degree(),
                coords.len()
            )));
        }
        Ok(FieldElem { field: self.clone(), coords })
    }

    pub fn from_rational(&self, q: &Rational) -> FieldElem {
        let mut coords = vec![Rational::zero(); self.degree()];
        coords[0] = q.clone();
        FieldElem { field: self.clone(), coords }
    }

    pub fn zero(&self) -> FieldElem {
        self.from_rational(&Rational::zero())
    }

    pub fn one(&self) -> FieldElem {
        self.from_rational(&Rational::one())
    }

    /// The generator θ.
    pub fn theta(&self) -> FieldElem {
        let mut coords = vec![Rational::zero(); self.degree()];
        coords[1] = Rational::one();
        FieldElem { field: self.clone(), coords }
    }

    /// Reduces a polynomial in θ modulo the defining polynomial.
    fn reduce(&self, mut p: Vec<Rational>) -> Vec<Rational> {
        let d = self.degree();
        let f = &self.0.minpoly;
        while p.len() > d {
            let top = p.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let k = p.len() - d;
            for (i, c) in f.iter().take(d).enumerate() {
                p[k + i] -= &top * from_bigint(c.clone());
            }
        }
        p.resize(d, Rational::zero());
        p
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.0.minpoly.iter().map(|c| c.to_string()).collect();
        write!(f, "Q[x]/({})", terms.join(","))
    }
}

fn subset_sums(parts: &[usize]) -> Vec<bool> {
    let total: usize = parts.iter().sum();
    let mut reach = vec![false; total + 1];
    reach[0] = true;
    for &p in parts {
        for s in (p..=total).rev() {
            if reach[s - p] {
                reach[s] = true;
            }
        }
    }
    reach
}

/// Irreducibility of a monic integer polynomial of degree <= 8: factor-degree
/// patterns modulo small primes rule out most splittings; any surviving
/// degree is settled by recombining certified complex roots into candidate
/// integer factors and dividing exactly.
fn check_irreducible(f: &[BigInt]) -> Result<()> {
    let d = f.len() - 1;
    let fq = poly::to_rational(f);
    let g = poly::monic_gcd(&fq, &poly::derivative(&fq));
    if poly::degree(&g).unwrap_or(0) > 0 {
        return Err(Error::Reducible("polynomial has a repeated factor".into()));
    }
    let mut possible: Vec<bool> = (0..=d).map(|k| k >= 1 && k <= d / 2).collect();
    let mut tested = 0;
    for p in primes_below(400) {
        if !squarefree_mod_p(f, p) {
            continue;
        }
        let reach = subset_sums(&factor_degrees_mod_p(f, p));
        for k in 1..=d / 2 {
            possible[k] &= reach[k];
        }
        tested += 1;
        if tested >= 12 || !possible.iter().any(|&b| b) {
            break;
        }
    }
    if !possible.iter().any(|&b| b) {
        return Ok(());
    }
    let mut prec = 128;
    loop {
        let roots = match complex_roots(&fq, prec) {
            Ok(r) => r,
            Err(Error::PrecisionExhausted(_)) if prec < 4096 => {
                prec *= 2;
                continue;
            }
            Err(e) => return Err(e),
        };
        match find_factor(f, &roots, &possible, prec) {
            Ok(Some(k)) => return Err(Error::Reducible(format!("has a factor of degree {k}"))),
            Ok(None) => return Ok(()),
            Err(Error::PrecisionExhausted(_)) if prec < 4096 => prec *= 2,
            Err(e) => return Err(e),
        }
    }
}

fn find_factor(f: &[BigInt], roots: &[ComplexBall], possible: &[bool], prec: u32) -> Result<Option<usize>> {
    let d = roots.len();
    let fq = poly::to_rational(f);
    for mask in 1u32..(1 << d) {
        let k = mask.count_ones() as usize;
        if k > d / 2 || !possible[k] {
            continue;
        }
        // product of (x - root) over the subset, as complex balls
        let mut coeffs = vec![ComplexBall::one(prec)];
        for (i, z) in roots.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            let mut next = vec![ComplexBall::zero(prec); coeffs.len() + 1];
            for (j, c) in coeffs.iter().enumerate() {
                next[j + 1] = next[j + 1].add(c);
                next[j] = next[j].sub(&c.mul(z));
            }
            coeffs = next;
        }
        let mut cand = Vec::with_capacity(coeffs.len());
        let mut ok = true;
        for c in &coeffs {
            if !c.im.contains_zero() {
                ok = false;
                break;
            }
            let Some(n) = unique_integer(&c.re)? else {
                ok = false;
                break;
            };
            cand.push(Rational::from_integer(n));
        }
        if !ok {
            continue;
        }
        let (_, r) = poly::divrem(&fq, &cand);
        if r.is_empty() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// The single integer inside a ball, `None` when it holds none, and an error
/// when the ball is too wide to decide.
fn unique_integer(b: &RealBall) -> Result<Option<BigInt>> {
    let lo = b.lo().ceil().to_integer();
    let hi = b.hi().floor().to_integer();
    if lo > hi {
        return Ok(None);
    }
    if lo == hi {
        return Ok(Some(lo));
    }
    Err(Error::PrecisionExhausted("root product too wide to pin an integer".into()))
}

/// Element of a number field in the power basis 1, θ, …, θ^(q−1).
#[derive(Clone, Debug, PartialEq)]
pub struct FieldElem {
    field: NumberField,
    coords: Vec<Rational>,
}

impl Serialize for FieldElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coords.iter().map(format_rational).collect();
        v.serialize(s)
    }
}

impl FieldElem {
    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coords[1..].iter().all(Zero::is_zero) {
            Some(&self.coords[0])
        } else {
            None
        }
    }

    pub fn pow(&self, k: u32) -> FieldElem {
        let mut acc = self.field.one();
        for _ in 0..k {
            acc = Scalar::times(&acc, self);
        }
        acc
    }

    /// Matrix of multiplication by `self`: column j holds self·θ^j.
    pub fn mul_matrix(&self) -> Vec<Vec<Rational>> {
        let q = self.field.degree();
        let cols: Vec<Vec<Rational>> = (0..q)
            .map(|j| {
                let mut e = vec![Rational::zero(); q];
                e[j] = Rational::one();
                Scalar::times(self, &FieldElem { field: self.field.clone(), coords: e }).coords
            })
            .collect();
        transpose(&cols, q)
    }

    /// Monic minimal polynomial over Q, low degree first.
    pub fn minimal_polynomial(&self) -> Vec<Rational> {
        let q = self.field.degree();
        let mut powers = vec![self.field.one().coords];
        for k in 1..=q {
            let next = Scalar::times(
                &FieldElem { field: self.field.clone(), coords: powers[k - 1].clone() },
                self,
            );
            powers.push(next.coords);
            // relation among 1, x, …, x^k: kernel of the q×(k+1) matrix
            let m = transpose(&powers, q);
            let ker = nullspace(&m, k + 1, &Rational::zero());
            if let Some(c) = ker.into_iter().next() {
                let lead = c[k].clone();
                return c.into_iter().map(|x| x / &lead).collect();
            }
        }
        unreachable!("minimal polynomial has degree at most q")
    }

    /// Primitive integer minimal polynomial with positive leading coefficient.
    pub fn primitive_minimal_polynomial(&self) -> Vec<BigInt> {
        poly::primitive_integer(&self.minimal_polynomial())
    }

    pub fn degree(&self) -> usize {
        self.minimal_polynomial().len() - 1
    }

    /// True when Q(self) is the whole field.
    pub fn generates(&self) -> bool {
        self.degree() == self.field.degree()
    }

    pub fn norm(&self) -> Rational {
        let proto = Rational::zero();
        super::linalg::det(&self.mul_matrix(), &proto)
    }
}

impl Scalar for FieldElem {
    fn zero_like(&self) -> Self {
        self.field.zero()
    }
    fn one_like(&self) -> Self {
        self.field.one()
    }
    fn from_rational_like(&self, q: &Rational) -> Self {
        self.field.from_rational(q)
    }
    fn plus(&self, o: &Self) -> Self {
        debug_assert!(self.field == o.field);
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect();
        FieldElem { field: self.field.clone(), coords }
    }
    fn minus(&self, o: &Self) -> Self {
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect();
        FieldElem { field: self.field.clone(), coords }
    }
    fn times(&self, o: &Self) -> Self {
        if let Some(a) = self.as_rational() {
            return FieldElem { field: self.field.clone(), coords: o.coords.iter().map(|c| c * a).collect() };
        }
        if let Some(b) = o.as_rational() {
            return FieldElem { field: self.field.clone(), coords: self.coords.iter().map(|c| c * b).collect() };
        }
        let mut prod = vec![Rational::zero(); self.coords.len() + o.coords.len() - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coords.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        FieldElem { field: self.field.clone(), coords: self.field.reduce(prod) }
    }
    fn negated(&self) -> Self {
        FieldElem { field: self.field.clone(), coords: self.coords.iter().map(|c| -c).collect() }
    }
    fn checked_inv(&self) -> Option<Self> {
        if self.vanishes() {
            return None;
        }
        if let Some(a) = self.as_rational() {
            return Some(self.field.from_rational(&a.recip()));
        }
        let mut e0 = vec![Rational::zero(); self.field.degree()];
        e0[0] = Rational::one();
        let x = solve(&self.mul_matrix(), &e0)?;
        Some(FieldElem { field: self.field.clone(), coords: x })
    }
    fn vanishes(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c = format_rational(c);
            parts.push(match i {
                0 => c,
                1 => format!("{c}*t"),
                _ => format!("{c}*t^{i}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Discriminant sign helper for quadratic fields: x^2 + bx + c has real roots
/// iff b^2 - 4c > 0.
pub fn is_real_quadratic(f: &[BigInt]) -> bool {
    f.len() == 3 && f[2].is_one() && {
        let disc = &f[1] * &f[1] - BigInt::from(4) * &f[0];
        disc.is_positive() && disc.sqrt().pow(2) != disc
    }
}

/// Smallest prime above `start` at which the field polynomial stays
/// squarefree and has a root, suitable for a p-adic place with a degree-one
/// embedding.
pub fn split_prime_above(field: &NumberField, start: u64) -> Option<u64> {
    primes_below(100_000).into_iter().filter(|&p| p > start).find(|&p| {
        squarefree_mod_p(field.minpoly(), p)
            && factor_degrees_mod_p(field.minpoly(), p).first() == Some(&1)
    })
}

/// Images of θ under the automorphisms of the field, identity first. The
/// field is Galois exactly when there are `degree()` of them.
///
/// Quadratic fields use θ ↦ −c₁ − θ. Otherwise each permutation of the complex
/// roots is interpolated in f64, rounded to small-denominator rationals and
/// kept only if it is an exact root of the defining polynomial, so the list
/// is sound but may miss automorphisms with large coefficients.
pub fn automorphisms(field: &NumberField) -> Result<Vec<FieldElem>> {
    let q = field.degree();
    let theta = field.theta();
    if q == 2 {
        let c1 = from_bigint(field.minpoly()[1].clone());
        let conj = field.from_rational(&-c1).minus(&theta);
        return Ok(vec![theta, conj]);
    }
    let f = field.minpoly_rational();
    let roots: Vec<(f64, f64)> = complex_roots(&f, 64)?.iter().map(|r| r.to_f64()).collect();
    let roots: Vec<num_complex::Complex64> = roots.into_iter().map(|(a, b)| num_complex::Complex64::new(a, b)).collect();
    let vinv = invert_vandermonde(&roots).ok_or_else(|| Error::PrecisionExhausted("Vandermonde inversion".into()))?;
    let mut found = vec![theta.clone()];
    let mut perm: Vec<usize> = (0..q).collect();
    let mut visit = |perm: &[usize]| {
        let mut coords = Vec::with_capacity(q);
        for row in &vinv {
            let c: num_complex::Complex64 = row.iter().zip(perm).map(|(v, &j)| v * roots[j]).sum();
            if c.im.abs() > 1e-7 {
                return;
            }
            match approx_rational(c.re, 1 << 16) {
                Some(x) => coords.push(x),
                None => return,
            }
        }
        let g = FieldElem { field: field.clone(), coords };
        if !found.contains(&g) && poly_at(field, &g).vanishes() {
            found.push(g);
        }
    };
    heap_permutations(&mut perm, q, &mut visit);
    Ok(found)
}

/// P(g) computed in the field.
fn poly_at(field: &NumberField, g: &FieldElem) -> FieldElem {
    let mut acc = field.zero();
    for c in field.minpoly_rational().iter().rev() {
        acc = acc.times(g).plus(&field.from_rational(c));
    }
    acc
}

fn heap_permutations(a: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        visit(a);
        return;
    }
    for i in 0..k {
        heap_permutations(a, k - 1, visit);
        if k.is_multiple_of(2) {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
}

/// Inverse of V[m][k] = x_m^k by Gauss–Jordan in f64.
fn invert_vandermonde(x: &[num_complex::Complex64]) -> Option<Vec<Vec<num_complex::Complex64>>> {
    use num_complex::Complex64 as C;
    let n = x.len();
    let mut a: Vec<Vec<C>> = (0..n)
        .map(|m| {
            let mut row: Vec<C> = (0..n).map(|k| x[m].powu(k as u32)).collect();
            row.extend((0..n).map(|j| if j == m { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        let p = a[col][col];
        for v in a[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                let pivot_row = a[col].clone();
                for (v, pv) in a[r].iter_mut().zip(pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    // a = [I | V⁻¹]; we need coefficients c = V⁻¹ y, rows of V⁻¹
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Continued-fraction approximation with denominator at most `max_den`,
/// accepted only if it matches x to 1e-9 relative accuracy.
fn approx_rational(x: f64, max_den: i64) -> Option<Rational> {
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let (h2, k2) = (a.checked_mul(h1)?.checked_add(h0)?, a.checked_mul(k1)?.checked_add(k0)?);
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - x).abs() <= 1e-9 * x.abs().max(1.0) {
            return Some(Rational::new(h1.into(), k1.into()));
        }
        let frac = y - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};

    #[test]
    fn irreducibility() {
        assert!(NumberField::from_i64(&[-2, 0, 1]).is_ok());
        assert!(matches!(NumberField::from_i64(&[-4, 0, 1]), Err(Error::Reducible(_))));
        // x^4 + 1 is irreducible but splits into quadratics mod every prime
        assert!(NumberField::from_i64(&[1, 0, 0, 0, 1]).is_ok());
        // (x^2 - 2)(x^2 - 3) = x^4 - 5x^2 + 6
        assert!(matches!(NumberField::from_i64(&[6, 0, -5, 0, 1]), Err(Error::Reducible(_))));
        assert!(NumberField::from_i64(&[-2, 0, 0, 1]).is_ok());
        assert!(NumberField::from_i64(&[1, 1]).is_err());
        assert!(NumberField::from_i64(&[1, 0, 2]).is_err());
    }

    #[test]
    fn arithmetic_in_q_sqrt2() {
        let k = NumberField::from_i64(&[-2, 0, 1]).unwrap();
        let t = k.theta();
        assert_eq!(Scalar::times(&t, &t), k.from_rational(&int(2)));
        let x = k.elem(vec![int(1), int(1)]).unwrap();
        let inv = Scalar::checked_inv(&x).unwrap();
        assert_eq!(Scalar::times(&x, &inv), k.one());
        assert_eq!(inv.coords(), &[int(-1), int(1)]);
        assert_eq!(x.norm(), int(-1));
        assert_eq!(x.minimal_polynomial(), vec![int(-1), int(-2), int(1)]);
        let half = k.elem(vec![int(0), rat(1, 2)]).unwrap();
        assert_eq!(half.primitive_minimal_polynomial(), vec![BigInt::from(-1), BigInt::zero(), BigInt::from(2)]);
        assert!(half.generates());
        assert!(!k.from_rational(&int(3)).generates());
    }

    #[test]
    fn real_quadratic_detection() {
        let b = |v: &[i64]| v.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>();
        assert!(is_real_quadratic(&b(&[-2, 0, 1])));
        assert!(!is_real_quadratic(&b(&[1, 0, 1])));
        assert!(!is_real_quadratic(&b(&[-4, 0, 1])));
    }

    #[test]
    fn automorphism_groups() {
        let k = NumberField::from_i64(&[-2, 0, 1]).unwrap();
        let a = automorphisms(&k).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[1], k.theta().negated());
        // x^4 + 1: cyclotomic, Galois of order 4
        let c8 = NumberField::from_i64(&[1, 0, 0, 0, 1]).unwrap();
        assert_eq!(automorphisms(&c8).unwrap().len(), 4);
        // x^3 - 2: only the identity
        let cube = NumberField::from_i64(&[-2, 0, 0, 1]).unwrap();
        assert_eq!(automorphisms(&cube).unwrap().len(), 1);
        // x^3 - 3x + 1: cyclic cubic
        let cyc = NumberField::from_i64(&[1, -3, 0, 1]).unwrap();
        assert_eq!(automorphisms(&cyc).unwrap().len(), 3);
    }
}
