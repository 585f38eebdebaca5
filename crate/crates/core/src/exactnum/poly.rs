//! Dense univariate polynomials, coefficients stored low degree first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ball::RealBall;
use super::complex::ComplexBall;
use super::padic::{modinv, PadicBall};
use super::rational::{from_bigint, Rational};
use crate::error::{Error, Result};

pub fn trim<T: Zero>(mut v: Vec<T>) -> Vec<T> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

pub fn degree<T: Zero>(v: &[T]) -> Option<usize> {
    v.iter().rposition(|c| !c.is_zero())
}

pub fn to_rational(f: &[BigInt]) -> Vec<Rational> {
    f.iter().cloned().map(from_bigint).collect()
}

pub fn derivative_int(f: &[BigInt]) -> Vec<BigInt> {
    f.iter().enumerate().skip(1).map(|(i, c)| c * i).collect()
}

pub fn derivative(f: &[Rational]) -> Vec<Rational> {
    f.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
        .collect()
}

pub fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let z = Rational::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

/// Euclidean division over Q; `b` must be nonzero.
pub fn divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let b = trim(b.to_vec());
    let db = degree(&b).expect("division by zero polynomial");
    let lead = b[db].clone();
    let mut r = trim(a.to_vec());
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] / &lead;
        for (j, bj) in b.iter().enumerate() {
            r[dr - db + j] -= &c * bj;
        }
        q[dr - db] = c;
        r = trim(r);
    }
    (trim(q), r)
}

pub fn monic_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(d) = degree(&x) {
        let l = x[d].clone();
        x.iter_mut().for_each(|c| *c /= &l);
    }
    x
}

pub fn eval_rational(f: &[Rational], x: &Rational) -> Rational {
    f.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

pub fn eval_int_at_rational(f: &[BigInt], x: &Rational) -> Rational {
    f.iter().rev().fold(Rational::zero(), |acc, c| acc * x + from_bigint(c.clone()))
}

pub fn eval_ball(f: &[Rational], x: &RealBall) -> RealBall {
    let p = x.prec();
    f.iter().rev().fold(RealBall::zero(p), |acc, c| acc.mul(x).add_q(c))
}

pub fn eval_complex(f: &[Rational], z: &ComplexBall) -> ComplexBall {
    let p = z.prec();
    f.iter()
        .rev()
        .fold(ComplexBall::zero(p), |acc, c| acc.mul(z).add(&ComplexBall::from_rational(c, p)))
}

pub fn eval_padic(f: &[Rational], z: &PadicBall, digits: i64) -> PadicBall {
    let p = z.prime().clone();
    f.iter().rev().fold(PadicBall::exact_integer(&p, BigInt::zero()), |acc, c| {
        acc.mul(z).add(&PadicBall::from_rational(&p, c, digits))
    })
}

pub fn content(f: &[BigInt]) -> BigInt {
    f.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

/// Scales a rational polynomial to a primitive integer one with positive
/// leading coefficient.
pub fn primitive_integer(f: &[Rational]) -> Vec<BigInt> {
    let f = trim(f.to_vec());
    let l = f.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = f.iter().map(|c| (c * from_bigint(l.clone())).to_integer()).collect();
    let g = content(&ints);
    let sign = if ints.last().is_some_and(|c| c.is_negative()) { -1 } else { 1 };
    ints.into_iter().map(|c| c * sign / &g).collect()
}

// ---- arithmetic over F_p, p < 2^63 ----

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod_u(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}

fn inv_u(a: u64, p: u64) -> u64 {
    powmod_u(a, p - 2, p)
}

pub fn reduce_mod_p(f: &[BigInt], p: u64) -> Vec<u64> {
    let bp = BigInt::from(p);
    trim(f.iter().map(|c| c.mod_floor(&bp).to_u64().unwrap()).collect())
}

fn fp_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    fp_trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    fp_trim(out)
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let m = fp_trim(m.to_vec());
    let dm = m.len() - 1;
    let li = inv_u(m[dm], p);
    let mut r = fp_trim(a.to_vec());
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = mulmod(r[dr], li, p);
        for (j, &mj) in m.iter().enumerate() {
            let k = dr - dm + j;
            r[k] = (r[k] + p - mulmod(c, mj, p)) % p;
        }
        r = fp_trim(r);
    }
    r
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (fp_trim(a.to_vec()), fp_trim(b.to_vec()));
    while !y.is_empty() {
        let r = fp_rem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(&l) = x.last() {
        let li = inv_u(l, p);
        x.iter_mut().for_each(|c| *c = mulmod(*c, li, p));
    }
    x
}

fn fp_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = fp_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_rem(&fp_mul(&acc, &b, p), m, p);
        }
        b = fp_rem(&fp_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    acc
}

fn fp_eval(f: &[u64], x: u64, p: u64) -> u64 {
    f.iter().rev().fold(0, |acc, &c| (mulmod(acc, x, p) + c) % p)
}

/// True when the reduction of the monic polynomial `f` mod p is squarefree.
pub fn squarefree_mod_p(f: &[BigInt], p: u64) -> bool {
    let fp = reduce_mod_p(f, p);
    let d = reduce_mod_p(&derivative_int(f), p);
    if d.is_empty() {
        return false;
    }
    fp_gcd(&fp, &d, p).len() == 1
}

/// Degrees of the irreducible factors of a monic squarefree polynomial mod p,
/// by distinct-degree factorization.
pub fn factor_degrees_mod_p(f: &[BigInt], p: u64) -> Vec<usize> {
    let mut rest = reduce_mod_p(f, p);
    let x = vec![0u64, 1];
    let mut h = x.clone();
    let mut out = Vec::new();
    let mut d = 0;
    while rest.len() > 1 {
        d += 1;
        if 2 * d > rest.len() - 1 {
            out.push(rest.len() - 1);
            break;
        }
        h = fp_powmod(&h, p, &rest, p);
        let g = fp_gcd(&rest, &fp_sub(&h, &x, p), p);
        let gd = g.len() - 1;
        if gd > 0 {
            out.extend(std::iter::repeat_n(d, gd / d));
            rest = fp_div_exact(&rest, &g, p);
            h = fp_rem(&h, &rest, p);
        }
    }
    out.sort_unstable();
    out
}

fn fp_div_exact(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let li = inv_u(b[db], p);
    let mut r = a.to_vec();
    let mut q = vec![0u64; a.len() - db];
    for k in (0..q.len()).rev() {
        let c = mulmod(r[k + db], li, p);
        q[k] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[k + j] = (r[k + j] + p - mulmod(c, bj, p)) % p;
        }
    }
    fp_trim(q)
}

pub const BRUTE_FORCE_PRIME_LIMIT: u64 = 1 << 20;

/// Roots of f in F_p by exhaustive evaluation.
pub fn roots_mod_p(f: &[BigInt], p: u64) -> Result<Vec<u64>> {
    if p > BRUTE_FORCE_PRIME_LIMIT {
        return Err(Error::InvalidInput(format!(
            "prime {p} exceeds the root-search limit {BRUTE_FORCE_PRIME_LIMIT}"
        )));
    }
    let fp = reduce_mod_p(f, p);
    Ok((0..p).filter(|&x| fp_eval(&fp, x, p) == 0).collect())
}

/// Newton lifting of a simple root r0 of f mod p to a root mod p^digits.
pub fn hensel_lift(f: &[BigInt], r0: u64, p: &BigInt, digits: i64) -> BigInt {
    let df = derivative_int(f);
    let mut r = BigInt::from(r0);
    let mut k: i64 = 1;
    while k < digits {
        k = (2 * k).min(digits);
        let m = num_traits::pow(p.clone(), k as usize);
        let fv = f.iter().rev().fold(BigInt::zero(), |acc, c| (acc * &r + c).mod_floor(&m));
        let dv = df.iter().rev().fold(BigInt::zero(), |acc, c| (acc * &r + c).mod_floor(&m));
        let inv = modinv(&dv, &m).expect("simple root");
        r = (&r - fv * inv).mod_floor(&m);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn factor_degree_patterns() {
        // x^2 - 2: splits mod 7, inert mod 5
        let f = ints(&[-2, 0, 1]);
        assert_eq!(factor_degrees_mod_p(&f, 7), vec![1, 1]);
        assert_eq!(factor_degrees_mod_p(&f, 5), vec![2]);
        // x^4 + 1 mod 3 -> two quadratics
        assert_eq!(factor_degrees_mod_p(&ints(&[1, 0, 0, 0, 1]), 3), vec![2, 2]);
        assert!(!squarefree_mod_p(&f, 2));
        assert!(squarefree_mod_p(&f, 7));
    }

    #[test]
    fn hensel_lifting_gives_roots() {
        let f = ints(&[-2, 0, 1]);
        let p = BigInt::from(7);
        for r0 in roots_mod_p(&f, 7).unwrap() {
            let r = hensel_lift(&f, r0, &p, 20);
            let m = num_traits::pow(p.clone(), 20);
            let sq: BigInt = &r * &r - 2;
            assert!(sq.mod_floor(&m).is_zero());
        }
    }

    #[test]
    fn rational_division() {
        let a = to_rational(&ints(&[-1, 0, 0, 1]));
        let b = to_rational(&ints(&[-1, 1]));
        let (q, r) = divrem(&a, &b);
        assert!(r.is_empty());
        assert_eq!(q, vec![int(1), int(1), int(1)]);
        assert_eq!(monic_gcd(&a, &to_rational(&ints(&[-1, 0, 1]))), vec![int(-1), int(1)]);
    }
}
