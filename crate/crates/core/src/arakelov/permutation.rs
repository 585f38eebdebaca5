//! Size of the permutation operators η(σ) on E₁^{⊗b₁} ⊗ … ⊗ Eₙ^{⊗bₙ}, each
//! Eᵢ with an orthonormal basis of eᵢ vectors.
//!
//! In the orthonormal tensor basis v_R, η(σ) sends v_R to v_{σ(R)}, so its
//! matrix is a 0/1 matrix. The quantity computed is
//! sup ‖η(σ)T‖₂ / max_R |T_R|; for a matrix with nonnegative entries it is
//! attained at T = Σ v_R.

use num_bigint::BigInt;
use serde::Serialize;

use crate::exactnum::rational::from_bigint;
use crate::exactnum::{RealBall, Verdict};
use crate::{Error, Result};

/// Default cap on the number of basis tensors.
pub const DEFAULT_PERMUTATION_LIMIT: u128 = 1 << 20;

#[derive(Clone, Debug, Serialize)]
pub struct PermutationNormReport {
    pub check: &'static str,
    pub e: Vec<u64>,
    pub db: Vec<u64>,
    pub sigma: Vec<Vec<usize>>,
    pub basis_size: u128,
    /// ‖η(σ)·Σ v_R‖₂², the squared norm.
    pub norm_sq: u128,
    /// ∏ eᵢ^{bᵢ}, the squared bound.
    pub bound_sq: u128,
    pub norm: RealBall,
    /// η(σ) permutes the basis, hence is an ℓ²-isometry.
    pub isometry: bool,
    pub equality: bool,
    pub verdict: Verdict,
}

fn check_permutation(s: &[usize], len: u64) -> Result<()> {
    let mut seen = vec![false; len as usize];
    if s.len() != len as usize {
        return Err(Error::InvalidInput(format!("permutation of length {} on {len} slots", s.len())));
    }
    for &j in s {
        if j >= len as usize || std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidInput(format!("{s:?} is not a permutation of 0..{len}")));
        }
    }
    Ok(())
}

pub fn permutation_norm_check(e: &[u64], db: &[u64], sigma: &[Vec<usize>], limit: u128, prec: u32) -> Result<PermutationNormReport> {
    if e.len() != db.len() || e.len() != sigma.len() {
        return Err(Error::InvalidInput("ranks, exponents and permutations need equal lengths".into()));
    }
    if e.contains(&0) {
        return Err(Error::InvalidInput("ranks must be positive".into()));
    }
    for (s, &b) in sigma.iter().zip(db) {
        check_permutation(s, b)?;
    }
    // slots of R in order: factor i, position j, each with radix eᵢ
    let radices: Vec<u128> = e.iter().zip(db).flat_map(|(&ei, &bi)| std::iter::repeat_n(ei as u128, bi as usize)).collect();
    let mut count: u128 = 1;
    for &x in &radices {
        count = count.checked_mul(x).filter(|&c| c <= limit).ok_or(Error::SizeLimit { count: u128::MAX, limit })?;
    }
    // σ(R)_{i,j} = R_{i,σᵢ(j)}, flattened to slot indices
    let mut source = Vec::with_capacity(radices.len());
    let mut offset = 0usize;
    for (s, &b) in sigma.iter().zip(db) {
        source.extend(s.iter().map(|&j| offset + j));
        offset += b as usize;
    }
    let mut hits = vec![0u32; count as usize];
    let mut digits = vec![0u128; radices.len()];
    for idx in 0..count {
        let mut rem = idx;
        for (d, &rad) in digits.iter_mut().zip(&radices).rev() {
            *d = rem % rad;
            rem /= rad;
        }
        let image = source.iter().zip(&radices).fold(0u128, |acc, (&src, &rad)| acc * rad + digits[src]);
        hits[image as usize] += 1;
    }
    let isometry = hits.iter().all(|&h| h == 1);
    let norm_sq: u128 = hits.iter().map(|&h| (h as u128) * (h as u128)).sum();
    let bound_sq: u128 = e.iter().zip(db).map(|(&ei, &bi)| (ei as u128).pow(bi as u32)).product();
    let norm = RealBall::exact(from_bigint(BigInt::from(norm_sq)), prec).sqrt()?;
    Ok(PermutationNormReport {
        check: "permutation-operator-norm",
        e: e.to_vec(),
        db: db.to_vec(),
        sigma: sigma.to_vec(),
        basis_size: count,
        norm_sq,
        bound_sq,
        norm,
        isometry,
        equality: norm_sq == bound_sq,
        verdict: Verdict::from_bool(norm_sq <= bound_sq),
    })
}
