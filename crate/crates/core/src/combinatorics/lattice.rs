use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::MultiDegree;
use crate::exactnum::rational::Rational;
use crate::{Error, Result};

/// Default cap on the number of box points scanned.
pub const DEFAULT_LATTICE_LIMIT: u128 = 10_000_000;

/// `Lower`: Σ ℓᵢ/rᵢ < t. `Upper`: Σ ℓᵢ/rᵢ ≥ t.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

/// Visits every ℓ in ∏[0, rᵢ] on the requested side of t. The comparison is
/// done over the common denominator ∏rᵢ, so it is exact integer arithmetic.
fn for_each_point(r: &MultiDegree, t: &Rational, side: Side, limit: u128, mut f: impl FnMut(&[u64])) -> Result<()> {
    let count = r.box_size();
    if count > limit {
        return Err(Error::SizeLimit { count, limit });
    }
    if t < &Rational::zero() {
        return Err(Error::DomainError(format!("t = {t} is negative")));
    }
    let d = r.degrees();
    let n = d.len();
    let prod: u128 = r.product();
    // weights w_i = ∏_{j≠i} r_j, so Σ ℓᵢ/rᵢ = Σ ℓᵢ wᵢ / prod
    let w: Vec<i128> = (0..n).map(|i| (prod / d[i] as u128) as i128).collect();
    // Σ ℓᵢwᵢ < t·prod  ⇔  Σ ℓᵢwᵢ·den < num·prod
    let (num, den) = (t.numer().clone(), t.denom().clone());
    let thr = num * num_bigint::BigInt::from(prod);
    let den_i: num_bigint::BigInt = den;
    let mut l = vec![0u64; n];
    let mut s: i128 = 0;
    loop {
        let below = num_bigint::BigInt::from(s) * &den_i < thr;
        if below == (side == Side::Lower) {
            f(&l);
        }
        // odometer
        let mut i = 0;
        loop {
            if i == n {
                return Ok(());
            }
            if l[i] < d[i] {
                l[i] += 1;
                s += w[i];
                break;
            }
            s -= w[i] * l[i] as i128;
            l[i] = 0;
            i += 1;
        }
    }
}

pub fn lattice_points(r: &MultiDegree, t: &Rational, side: Side, limit: u128) -> Result<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    for_each_point(r, t, side, limit, |l| out.push(l.to_vec()))?;
    Ok(out)
}

pub fn count_points(r: &MultiDegree, t: &Rational, side: Side, limit: u128) -> Result<u128> {
    let mut c = 0u128;
    for_each_point(r, t, side, limit, |_| c += 1)?;
    Ok(c)
}

/// μ^Z_{r,i}(t) = Σ_{ℓ ∈ ▽_r^Z(t)} (2ℓᵢ − rᵢ), with 1-based i.
pub fn mu_z(r: &MultiDegree, i: usize, t: &Rational, limit: u128) -> Result<i128> {
    if i == 0 || i > r.n() {
        return Err(Error::DomainError(format!("factor index {i} outside 1..={}", r.n())));
    }
    let ri = r.get(i - 1) as i128;
    let mut s = 0i128;
    for_each_point(r, t, Side::Upper, limit, |l| s += 2 * l[i - 1] as i128 - ri)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::vol_lower;
    use crate::exactnum::rational::{int, rat, to_f64};

    fn md(r: &[u64]) -> MultiDegree {
        MultiDegree::new(r.to_vec()).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        let r = md(&[2, 2]);
        let mut lo = lattice_points(&r, &int(1), Side::Lower, DEFAULT_LATTICE_LIMIT).unwrap();
        lo.sort();
        assert_eq!(lo, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert_eq!(count_points(&r, &int(1), Side::Upper, DEFAULT_LATTICE_LIMIT).unwrap(), 6);
        assert_eq!(count_points(&md(&[3, 1, 4]), &int(0), Side::Upper, DEFAULT_LATTICE_LIMIT).unwrap(), 40);
        assert!(matches!(count_points(&md(&[9, 9]), &int(1), Side::Upper, 50), Err(Error::SizeLimit { count: 100, limit: 50 })));
    }

    #[test]
    fn mu_z_examples() {
        let r = md(&[2, 2]);
        assert_eq!(mu_z(&r, 1, &int(1), DEFAULT_LATTICE_LIMIT).unwrap(), 4);
        assert_eq!(mu_z(&r, 1, &int(2), DEFAULT_LATTICE_LIMIT).unwrap(), 2);
        assert_eq!(mu_z(&md(&[3, 5, 2]), 2, &int(0), DEFAULT_LATTICE_LIMIT).unwrap(), 0);
        assert_eq!(mu_z(&md(&[3, 1]), 1, &rat(1, 2), DEFAULT_LATTICE_LIMIT).unwrap(), mu_z(&md(&[3, 1]), 1, &rat(1, 2), DEFAULT_LATTICE_LIMIT).unwrap());
    }

    #[test]
    fn counts_approach_volume() {
        // |#△/(αⁿ∏r) − vol| ≤ C/α with C fitted from α = 1..16 (observed max
        // of α·error is below 2 for these cases)
        for r in [vec![1u64, 1], vec![2, 1], vec![1, 1, 1], vec![2, 1, 3]] {
            let base = md(&r);
            for t in [rat(1, 2), int(1), rat(7, 5)] {
                let vol = to_f64(&vol_lower(base.n(), &t).unwrap());
                for alpha in 1..=16u64 {
                    let ra = base.scaled(alpha);
                    let c = count_points(&ra, &t, Side::Lower, DEFAULT_LATTICE_LIMIT).unwrap() as f64;
                    let norm = (alpha as f64).powi(base.n() as i32) * base.product() as f64;
                    let err = (c / norm - vol).abs();
                    assert!(err * alpha as f64 <= 2.0 * base.n() as f64, "r={r:?} t={t} alpha={alpha} err={err}");
                }
            }
        }
    }
}
