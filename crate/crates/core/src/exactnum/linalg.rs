//! Exact dense linear algebra over any `Scalar`, integer Smith invariants,
//! p-adic elimination valuations and complex-ball determinants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::complex::ComplexBall;
use super::padic::PadicBall;
use super::Scalar;
use crate::error::{Error, Result};

pub type Matrix<T> = Vec<Vec<T>>;

pub fn transpose<T: Clone>(m: &[Vec<T>], ncols: usize) -> Matrix<T> {
    (0..ncols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// In-place reduced row echelon form; returns pivot columns. Zero rows are
/// dropped so the result is canonical for the row space.
pub fn rref<T: Scalar>(m: &mut Matrix<T>) -> Vec<usize> {
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].vanishes()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].checked_inv().expect("nonzero pivot");
        for x in m[row].iter_mut() {
            *x = x.times(&inv);
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].vanishes() {
                let f = m[i][col].clone();
                let (top, rest) = if i < row {
                    let (a, b) = m.split_at_mut(row);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[row], &mut b[0])
                };
                for (x, y) in rest.iter_mut().zip(top.iter()) {
                    *x = x.minus(&f.times(y));
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    pivots
}

pub fn rank<T: Scalar>(m: &[Vec<T>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Basis of the right kernel `{x : m x = 0}` in `ncols` unknowns.
pub fn nullspace<T: Scalar>(m: &[Vec<T>], ncols: usize, proto: &T) -> Matrix<T> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let zero = proto.zero_like();
    let one = proto.one_like();
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![zero.clone(); ncols];
        v[free] = one.clone();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = a[r][free].negated();
        }
        out.push(v);
    }
    out
}

pub fn det<T: Scalar>(m: &[Vec<T>], proto: &T) -> T {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = proto.one_like();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].vanishes()) else {
            return proto.zero_like();
        };
        if p != c {
            a.swap(p, c);
            d = d.negated();
        }
        d = d.times(&a[c][c]);
        let inv = a[c][c].checked_inv().expect("nonzero pivot");
        for i in c + 1..n {
            if a[i][c].vanishes() {
                continue;
            }
            let f = a[i][c].times(&inv);
            for j in c..n {
                let t = f.times(&a[c][j]);
                a[i][j] = a[i][j].minus(&t);
            }
        }
    }
    d
}

/// Unique solution of the square system `m x = b`, or `None` when singular.
pub fn solve<T: Scalar>(m: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = m.len();
    let mut aug: Matrix<T> =
        m.iter().zip(b).map(|(row, bi)| row.iter().cloned().chain([bi.clone()]).collect()).collect();
    let piv = rref(&mut aug);
    if piv.len() != n || piv.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

pub fn mat_mul<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>], proto: &T) -> Matrix<T> {
    let inner = b.len();
    let ncols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..ncols)
                .map(|j| (0..inner).fold(proto.zero_like(), |acc, k| acc.plus(&row[k].times(&b[k][j]))))
                .collect()
        })
        .collect()
}

/// Canonical basis (RREF rows) of the sum of two row spaces.
pub fn row_space_sum<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Matrix<T> {
    let mut m: Matrix<T> = a.iter().chain(b.iter()).cloned().collect();
    rref(&mut m);
    m
}

/// Canonical basis of the intersection of two row spaces in `ncols` coordinates.
pub fn row_space_intersection<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>], ncols: usize, proto: &T) -> Matrix<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // x in both iff x = u A = w B, i.e. (u, -w) in the left kernel of [A; B].
    let stacked: Matrix<T> = a.iter().chain(b.iter()).cloned().collect();
    let kernel = nullspace(&transpose(&stacked, ncols), stacked.len(), proto);
    let mut out: Matrix<T> = kernel
        .iter()
        .map(|u| {
            (0..ncols)
                .map(|j| (0..a.len()).fold(proto.zero_like(), |acc, i| acc.plus(&u[i].times(&a[i][j]))))
                .collect()
        })
        .collect();
    rref(&mut out);
    out
}

/// Nonzero invariant factors of an integer matrix, in divisibility order.
pub fn smith_invariants(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = a[i][t].div_floor(&a[t][t]);
            if !q.is_zero() {
                for j in t..cols {
                    let s = &q * &a[t][j];
                    a[i][j] -= s;
                }
            }
            clean &= a[i][t].is_zero();
        }
        for j in t + 1..cols {
            let q = a[t][j].div_floor(&a[t][t]);
            if !q.is_zero() {
                for i in t..rows {
                    let s = &q * &a[i][t];
                    a[i][j] -= s;
                }
            }
            clean &= a[t][j].is_zero();
        }
        if !clean {
            continue;
        }
        let p = a[t][t].clone();
        let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&p)));
        if let Some(i) = bad {
            for j in t..cols {
                let s = a[i][j].clone();
                a[t][j] += s;
            }
            continue;
        }
        out.push(p.abs());
        t += 1;
    }
    out
}

/// Product of the invariant factors: the gcd of the maximal nonvanishing minors.
pub fn determinantal_divisor(m: &[Vec<BigInt>]) -> BigInt {
    smith_invariants(m).iter().fold(BigInt::one(), |acc, d| acc * d)
}

/// Valuations of the pivots of full p-adic elimination on a matrix of full
/// row rank. Their sum is the valuation of the gcd of the maximal minors.
pub fn padic_pivot_valuations(m: &[Vec<PadicBall>]) -> Result<Vec<i64>> {
    let mut a = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for t in 0..rows {
        let mut best: Option<(i64, usize, usize)> = None;
        let mut floor = i64::MAX;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                match x.valuation() {
                    Ok(Some(v)) if best.is_none_or(|(bv, _, _)| v < bv) => best = Some((v, i, j)),
                    Ok(_) => {}
                    Err(_) => floor = floor.min(x.abs_prec().unwrap_or(i64::MAX)),
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            return Err(Error::PrecisionExhausted(
                "p-adic elimination found no certified nonzero pivot".into(),
            ));
        };
        if v >= floor {
            return Err(Error::PrecisionExhausted(format!(
                "p-adic pivot valuation {v} not below working precision {floor}"
            )));
        }
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let digits = a[t][t].abs_prec().unwrap_or(v + 64) - v;
        let pivot_inv = a[t][t].inv(digits)?;
        for i in t + 1..rows {
            let f = a[i][t].mul(&pivot_inv);
            for j in t..cols {
                let s = f.mul(&a[t][j]);
                a[i][j] = a[i][j].sub(&s);
            }
        }
        out.push(v);
    }
    Ok(out)
}

/// Determinant of a square complex-ball matrix by Gaussian elimination with
/// pivots chosen among entries certified nonzero.
pub fn complex_det(m: &[Vec<ComplexBall>]) -> Result<ComplexBall> {
    let n = m.len();
    let prec = m.first().and_then(|r| r.first()).map_or(64, ComplexBall::prec);
    let mut a = m.to_vec();
    let mut d = ComplexBall::one(prec);
    for c in 0..n {
        let pick = (c..n)
            .filter(|&i| !a[i][c].contains_zero())
            .max_by(|&i, &j| {
                let (x, y) = (a[i][c].norm_sqr().to_f64(), a[j][c].norm_sqr().to_f64());
                x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal)
            });
        let Some(p) = pick else {
            return Err(Error::PrecisionExhausted(format!(
                "no certified nonzero pivot in column {c} at {prec} bits"
            )));
        };
        if p != c {
            a.swap(p, c);
            d = d.neg();
        }
        d = d.mul(&a[c][c]);
        let inv = a[c][c].inv()?;
        for i in c + 1..n {
            let f = a[i][c].mul(&inv);
            for j in c..n {
                let t = f.mul(&a[c][j]);
                a[i][j] = a[i][j].sub(&t);
            }
        }
    }
    Ok(d)
}
