//! Volume and threshold functions of the unit cube, their inversions, and the
//! integer points of the scaled simplex slices.
//!
//! `vol△ₙ(t)` is the volume of `{ζ ∈ [0,1]ⁿ : Σζ < t}` and
//! `μₙ(t) = ∫_{Σζ ≥ t} (2ζ₁ − 1)`. Both are materialized once per `n` as
//! exact piecewise polynomials with breakpoints 0, 1, …, n.

pub mod lattice;
pub mod piecewise;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactnum::ball::ln_rational;
use crate::exactnum::rational::{binomial, factorial, from_bigint, int, Rational};
use crate::exactnum::RealBall;
use crate::{Error, Result};

pub use lattice::{count_points, lattice_points, mu_z, Side, DEFAULT_LATTICE_LIMIT};
pub use piecewise::PiecewisePoly;

/// Largest n for which the piecewise polynomials are materialized.
pub const MAX_N: usize = 40;

/// Multidegree r = (r₁, …, rₙ), all rᵢ ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct MultiDegree {
    r: Vec<u64>,
    total: u64,
}

impl MultiDegree {
    pub fn new(r: Vec<u64>) -> Result<MultiDegree> {
        if r.is_empty() || r.contains(&0) {
            return Err(Error::InvalidInput(format!("multidegree {r:?} needs n >= 1 and positive entries")));
        }
        let total = r.iter().sum();
        Ok(MultiDegree { r, total })
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn degrees(&self) -> &[u64] {
        &self.r
    }

    /// rᵢ for 0-based i.
    pub fn get(&self, i: usize) -> u64 {
        self.r[i]
    }

    /// |r| = Σ rᵢ.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// ∏ rᵢ.
    pub fn product(&self) -> u128 {
        self.r.iter().map(|&x| x as u128).product()
    }

    /// ∏ (rᵢ + 1): the dimension of the space of sections.
    pub fn box_size(&self) -> u128 {
        self.r.iter().map(|&x| x as u128 + 1).product()
    }

    pub fn scaled(&self, alpha: u64) -> MultiDegree {
        MultiDegree::new(self.r.iter().map(|x| x * alpha).collect()).expect("positive scaling")
    }
}

impl TryFrom<Vec<u64>> for MultiDegree {
    type Error = Error;
    fn try_from(r: Vec<u64>) -> Result<MultiDegree> {
        MultiDegree::new(r)
    }
}

impl From<MultiDegree> for Vec<u64> {
    fn from(m: MultiDegree) -> Vec<u64> {
        m.r
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::DomainError(format!("n = {n} outside 1..={MAX_N}")));
    }
    Ok(())
}

fn check_t(n: usize, t: &Rational) -> Result<()> {
    check_n(n)?;
    if t < &Rational::zero() || t > &int(n as i64) {
        return Err(Error::DomainError(format!("t = {t} outside [0, {n}]")));
    }
    Ok(())
}

type Cache = OnceLock<Mutex<HashMap<usize, Arc<PiecewisePoly>>>>;

fn cached(cache: &'static Cache, n: usize, build: impl FnOnce() -> PiecewisePoly) -> Arc<PiecewisePoly> {
    let map = cache.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = map.lock().unwrap().get(&n) {
        return p.clone();
    }
    // built outside the lock; a racing builder produces the same value
    let p = Arc::new(build());
    map.lock().unwrap().entry(n).or_insert(p).clone()
}

/// vol△ₙ as a piecewise polynomial: on [k, k+1] it is
/// (1/n!) Σ_{j ≤ k} (−1)^j C(n,j) (t − j)ⁿ.
pub fn vol_poly(n: usize) -> Result<Arc<PiecewisePoly>> {
    check_n(n)?;
    static CACHE: Cache = OnceLock::new();
    Ok(cached(&CACHE, n, || {
        let nf = from_bigint(factorial(n as u64));
        let mut acc = vec![Rational::zero(); n + 1];
        let mut pieces = Vec::with_capacity(n);
        for k in 0..n {
            // add (−1)^k C(n,k) (t − k)ⁿ / n!
            let c = from_bigint(binomial(n as u64, k as u64)) / &nf * int(if k % 2 == 0 { 1 } else { -1 });
            let base = piecewise::shift(&{
                let mut m = vec![Rational::zero(); n + 1];
                m[n] = Rational::one();
                m
            }, &int(-(k as i64)));
            for (i, b) in base.iter().enumerate() {
                acc[i] += &c * b;
            }
            pieces.push(acc.clone());
        }
        PiecewisePoly::new((0..=n as i64).map(int).collect(), pieces)
    }))
}

/// μₙ via μ₁(t) = t − t² and μₙ(t) = ∫_{t−1}^{t} μₙ₋₁, μₙ₋₁ extended by 0.
pub fn mu_poly(n: usize) -> Result<Arc<PiecewisePoly>> {
    check_n(n)?;
    static CACHE: Cache = OnceLock::new();
    if n == 1 {
        return Ok(cached(&CACHE, 1, || PiecewisePoly::new(vec![int(0), int(1)], vec![vec![int(0), int(1), int(-1)]])));
    }
    let prev = mu_poly(n - 1)?;
    Ok(cached(&CACHE, n, || prev.unit_window_integral(&Rational::zero(), &Rational::zero())))
}

/// Exact vol△ₙ(t) by inclusion–exclusion.
pub fn vol_lower(n: usize, t: &Rational) -> Result<Rational> {
    check_t(n, t)?;
    let mut s = Rational::zero();
    for k in 0..=n {
        let d = t - int(k as i64);
        if d <= Rational::zero() {
            break;
        }
        let term = from_bigint(binomial(n as u64, k as u64)) * num_traits::pow(d, n);
        if k % 2 == 0 {
            s += term;
        } else {
            s -= term;
        }
    }
    Ok(s / from_bigint(factorial(n as u64)))
}

/// vol▽ₙ(t) = 1 − vol△ₙ(t).
pub fn vol_upper(n: usize, t: &Rational) -> Result<Rational> {
    Ok(Rational::one() - vol_lower(n, t)?)
}

pub fn mu(n: usize, t: &Rational) -> Result<Rational> {
    check_t(n, t)?;
    Ok(mu_poly(n)?.eval(t))
}

fn check_ball(n: usize, t: &RealBall) -> Result<()> {
    check_n(n)?;
    if t.lo() < Rational::zero() || t.hi() > int(n as i64) {
        return Err(Error::DomainError(format!("ball {t} leaves [0, {n}]")));
    }
    Ok(())
}

pub fn vol_lower_ball(n: usize, t: &RealBall) -> Result<RealBall> {
    check_ball(n, t)?;
    Ok(vol_poly(n)?.eval_ball(t))
}

pub fn mu_ball(n: usize, t: &RealBall) -> Result<RealBall> {
    check_ball(n, t)?;
    Ok(mu_poly(n)?.eval_ball(t))
}

/// ∫_{△ₙ(t)} ζ₁ dλ = (vol△ₙ(t) − μₙ(t)) / 2.
pub fn zeta1_integral_lower(n: usize, t: &Rational) -> Result<Rational> {
    Ok((vol_lower(n, t)? - mu(n, t)?) / int(2))
}

/// ∫_{▽ₙ(t)} ζ₁ dλ = 1/2 − ∫_{△ₙ(t)} ζ₁ dλ.
pub fn zeta1_integral_upper(n: usize, t: &Rational) -> Result<Rational> {
    Ok(Rational::new(1.into(), 2.into()) - zeta1_integral_lower(n, t)?)
}

pub fn zeta1_integral_upper_ball(n: usize, t: &RealBall) -> Result<RealBall> {
    if let Some(q) = t.exact_value() {
        return Ok(RealBall::exact(zeta1_integral_upper(n, q)?, t.prec()));
    }
    let v = vol_lower_ball(n, t)?;
    let m = mu_ball(n, t)?;
    Ok(m.sub(&v).add_q(&int(1)).mul_q(&Rational::new(1.into(), 2.into())))
}

/// Solves vol△ₙ(u) = target for a target ball inside [0, 1]; monotone, so the
/// hull of the endpoint solutions encloses every solution.
pub fn invert_vol(n: usize, target: &RealBall, prec: u32) -> Result<RealBall> {
    check_n(n)?;
    let (zero, one) = (Rational::zero(), Rational::one());
    if target.lo() < zero || target.hi() > one {
        return Err(Error::DomainError(format!("volume target {target} outside [0, 1]")));
    }
    let vp = vol_poly(n)?;
    let top = int(n as i64);
    let solve = |y: &Rational| vp.solve_monotone(y, &zero, &top, prec);
    match target.exact_value() {
        Some(y) => Ok(solve(y)),
        None => Ok(solve(&target.lo()).hull(&solve(&target.hi()))),
    }
}

/// t_{q,n}(δ): the t ∈ [0, n] with 1 − q vol△ₙ(t) = δ.
pub fn t_qn(q: u64, n: usize, delta: &Rational, prec: u32) -> Result<RealBall> {
    if q == 0 {
        return Err(Error::DomainError("q must be at least 1".into()));
    }
    if delta < &Rational::zero() || delta > &Rational::one() {
        return Err(Error::DomainError(format!("delta = {delta} outside [0, 1]")));
    }
    let target = (Rational::one() - delta) / int(q as i64);
    invert_vol(n, &RealBall::exact(target, prec), prec)
}

/// R_{q,n}(δ) = (q − 1) / ((1 + δ^{(n+1)/n})^{1/(n−1)} − 1).
pub fn big_r(q: u64, n: usize, delta: &Rational, prec: u32) -> Result<RealBall> {
    if q < 2 {
        return Err(Error::DomainError("R is undefined for q = 1: the defining equation forces delta = 0".into()));
    }
    if n < 2 {
        return Err(Error::DomainError("R needs n >= 2".into()));
    }
    if delta <= &Rational::zero() || delta > &Rational::one() {
        return Err(Error::DomainError(format!("delta = {delta} outside (0, 1]")));
    }
    let work = prec + 32;
    let d = RealBall::exact(delta.clone(), work);
    let x = d.nth_root(n as u32)?.mul(&d).add_q(&int(1));
    let denom = x.nth_root(n as u32 - 1)?.add_q(&int(-1));
    Ok(RealBall::exact(int(q as i64 - 1), work).div(&denom)?.with_prec(prec))
}

/// ε_{q,r} = ∏_{i<n} (1 + max_{j>i} (r_j/r_i)(q − 1)) − 1, literally, for
/// any ordering of r.
pub fn eps_qr(q: u64, r: &MultiDegree) -> Rational {
    let d = r.degrees();
    let qm = int(q as i64 - 1);
    let mut prod = Rational::one();
    for i in 0..d.len().saturating_sub(1) {
        let mx = d[i + 1..].iter().max().copied().unwrap();
        prod *= Rational::one() + Rational::new((mx as i64).into(), (d[i] as i64).into()) * &qm;
    }
    prod - Rational::one()
}

/// Two-factor variant (q − 1)·min(r₁, r₂)/max(r₁, r₂); equals `eps_qr` when
/// r₁ ≥ r₂.
pub fn eps_pair(q: u64, r1: u64, r2: u64) -> Result<Rational> {
    if r1 == 0 || r2 == 0 {
        return Err(Error::InvalidInput("degrees must be positive".into()));
    }
    Ok(int(q as i64 - 1) * Rational::new((r1.min(r2) as i64).into(), (r1.max(r2) as i64).into()))
}

/// u_{q,r}(t): vol△ₙ(u) = clamp(1 + ε_{q,r} − q vol△ₙ(t), 0, 1).
pub fn u_qr(q: u64, r: &MultiDegree, t: &RealBall, prec: u32) -> Result<RealBall> {
    let n = r.n();
    let v = vol_lower_ball(n, t)?;
    let target = v.mul_q(&-int(q as i64)).add_q(&(Rational::one() + eps_qr(q, r))).clamp(&Rational::zero(), &Rational::one());
    invert_vol(n, &target, prec)
}

/// ũ_{q,r}(δ): vol△ₙ(ũ) = δ + ε_{q,r}.
pub fn u_tilde(q: u64, r: &MultiDegree, delta: &Rational, prec: u32) -> Result<RealBall> {
    let target = delta + eps_qr(q, r);
    if target > Rational::one() || delta < &Rational::zero() {
        return Err(Error::DomainError(format!("delta + eps = {target} outside [0, 1]")));
    }
    invert_vol(r.n(), &RealBall::exact(target, prec), prec)
}

/// w_{q,r}(δ) ∈ [n/2, n): μₙ(w) = μₙ(ũ_{q,r}(δ)) − ε_{q,r}.
pub fn w_qr(q: u64, r: &MultiDegree, delta: &Rational, prec: u32) -> Result<RealBall> {
    let n = r.n();
    let eps = eps_qr(q, r);
    let ut = u_tilde(q, r, delta, prec + 16)?;
    let mu_u = mu_ball(n, &ut)?;
    if !mu_u.gt(&RealBall::exact(eps.clone(), prec)).is_true() {
        return Err(Error::HypothesisFailed(format!("mu(u~) = {mu_u} is not above eps = {eps}")));
    }
    solve_mu_right(n, &mu_u.add_q(&-eps), prec)
}

/// Solves μₙ(w) = y for w ∈ [n/2, n], where μₙ decreases.
pub fn solve_mu_right(n: usize, y: &RealBall, prec: u32) -> Result<RealBall> {
    let mp = mu_poly(n)?;
    let (half, top) = (Rational::new((n as i64).into(), 2.into()), int(n as i64));
    let peak = mp.eval(&half);
    let y = y.clamp(&Rational::zero(), &peak);
    if y.hi() <= Rational::zero() && y.lo() < Rational::zero() {
        return Err(Error::DomainError(format!("mu target {y} is negative")));
    }
    let solve = |v: &Rational| mp.solve_monotone(v, &half, &top, prec);
    Ok(match y.exact_value() {
        Some(v) => solve(v),
        None => solve(&y.lo()).hull(&solve(&y.hi())),
    })
}

/// Lower tail bound vol△ₙ((1/2 − ε)n) ≤ exp(−6nε²), read as
/// t_{q,n}(0) ≥ n/2 − √(n log q / 6).
pub fn concentration_holds(q: u64, n: usize, prec: u32) -> Result<crate::Verdict> {
    let t = t_qn(q, n, &Rational::zero(), prec)?;
    let rhs = ln_rational(&int(q as i64), prec).mul_q(&Rational::new((n as i64).into(), 6.into())).sqrt()?;
    let rhs = rhs.neg().add_q(&Rational::new((n as i64).into(), 2.into()));
    Ok(t.ge(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::poly::eval_rational;
    use crate::exactnum::rational::rat;
    use proptest::prelude::*;

    fn md(r: &[u64]) -> MultiDegree {
        MultiDegree::new(r.to_vec()).unwrap()
    }

    #[test]
    fn volume_examples() {
        assert_eq!(vol_lower(2, &int(1)).unwrap(), rat(1, 2));
        assert_eq!(vol_lower(2, &rat(3, 2)).unwrap(), rat(7, 8));
        for n in 1..=6 {
            assert_eq!(vol_lower(n, &int(n as i64)).unwrap(), int(1));
            assert_eq!(vol_lower(n, &int(0)).unwrap(), int(0));
        }
        assert!(matches!(vol_lower(2, &rat(5, 2)), Err(Error::DomainError(_))));
    }

    #[test]
    fn volume_poly_matches_closed_form() {
        for n in 1..=7 {
            let p = vol_poly(n).unwrap();
            assert!(p.is_continuous());
            for k in 0..=(7 * n as i64) {
                let t = rat(k, 7);
                assert_eq!(p.eval(&t), vol_lower(n, &t).unwrap());
            }
            // nondecreasing: the derivative is nonnegative at interior sample points
            let d = p.derivative();
            for k in 0..=(10 * n as i64) {
                assert!(d.eval(&rat(k, 10)) >= Rational::zero());
            }
        }
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu(2, &int(1)).unwrap(), rat(1, 6));
        assert_eq!(mu(2, &rat(3, 2)).unwrap(), rat(1, 12));
        for n in 1..=6 {
            assert_eq!(mu(n, &int(0)).unwrap(), int(0));
            assert_eq!(mu(n, &int(n as i64)).unwrap(), int(0));
        }
        // μ₂(1.7) = μ₂(0.3) = 0.09/2 · (1 − 0.2)
        assert_eq!(mu(2, &rat(17, 10)).unwrap(), rat(9, 250));
    }

    #[test]
    fn mu_recursion_matches_closed_form_on_first_piece() {
        for n in 1..=6usize {
            let first = mu_poly(n).unwrap().pieces()[0].clone();
            let mut expect = vec![Rational::zero(); n + 2];
            let nf = from_bigint(factorial(n as u64));
            expect[n] = Rational::one() / &nf;
            expect[n + 1] = -int(2) / (nf * int(n as i64 + 1));
            assert_eq!(first, expect, "n = {n}");
        }
    }

    #[test]
    fn mu_unimodal_by_derivative_signs() {
        for n in 1..=6usize {
            let d = mu_poly(n).unwrap().derivative();
            for k in 1..(20 * n as i64) {
                let t = rat(k, 20);
                let s = d.eval(&t);
                let half = rat(n as i64, 2);
                if t < half {
                    assert!(s > Rational::zero());
                } else if t > half {
                    assert!(s < Rational::zero());
                } else {
                    assert!(s.is_zero());
                }
            }
        }
    }

    #[test]
    fn zeta_integrals() {
        assert_eq!(zeta1_integral_upper(2, &int(2)).unwrap(), int(0));
        assert_eq!(zeta1_integral_upper(2, &int(0)).unwrap(), rat(1, 2));
        // over {ζ₁ + ζ₂ ≥ 1}: ∫ ζ₁ = 1/3
        assert_eq!(zeta1_integral_upper(2, &int(1)).unwrap(), rat(1, 3));
    }

    #[test]
    fn t_qn_examples() {
        assert_eq!(t_qn(2, 2, &int(0), 64).unwrap().exact_value(), Some(&int(1)));
        assert_eq!(t_qn(3, 4, &int(1), 64).unwrap().exact_value(), Some(&int(0)));
        assert_eq!(t_qn(1, 2, &rat(1, 2), 64).unwrap().exact_value(), Some(&int(1)));
        let t = t_qn(2, 2, &rat(1, 5), 64).unwrap();
        assert!(t.sqr().contains(&rat(4, 5)));
        assert!(t.rad_log2().unwrap() < -60);
        // cubic piece: bisection
        let t3 = t_qn(2, 3, &rat(1, 10), 64).unwrap();
        assert!(t3.rad_log2().unwrap() <= -60);
        let v = vol_poly(3).unwrap();
        assert!(v.eval(&t3.lo()) <= rat(9, 20) && v.eval(&t3.hi()) >= rat(9, 20));
    }

    #[test]
    fn big_r_examples() {
        assert_eq!(big_r(2, 2, &rat(1, 4), 64).unwrap().exact_value(), Some(&int(8)));
        assert_eq!(big_r(3, 2, &rat(1, 4), 64).unwrap().exact_value(), Some(&int(16)));
        let r = big_r(2, 3, &int(1), 64).unwrap();
        // √2 + 1
        assert!(r.add_q(&int(-1)).sqr().contains(&int(2)) || r.add_q(&int(-1)).sqr().sub(&RealBall::from_int(2, 64)).contains_zero());
        assert!(matches!(big_r(1, 2, &rat(1, 4), 64), Err(Error::DomainError(_))));
    }

    #[test]
    fn eps_examples() {
        assert_eq!(eps_qr(1, &md(&[3, 5, 7])), int(0));
        assert_eq!(eps_qr(2, &md(&[10, 1])), rat(1, 10));
        assert_eq!(eps_qr(3, &md(&[4, 2, 1])), int(3));
        assert_eq!(eps_qr(5, &md(&[4])), int(0));
        assert_eq!(eps_pair(2, 10, 1).unwrap(), rat(1, 10));
        assert_eq!(eps_pair(2, 1, 10).unwrap(), rat(1, 10));
        // unsorted input: the literal definition differs from the pair variant
        assert_eq!(eps_qr(2, &md(&[1, 10])), int(10));
    }

    #[test]
    fn u_examples() {
        let r = md(&[12, 1]);
        let t = t_qn(2, 2, &rat(1, 5), 128).unwrap();
        let u = u_qr(2, &r, &t, 64).unwrap();
        assert!(u.sqr().sub(&RealBall::exact(rat(17, 30), 64)).rad_log2().unwrap() < -50);
        assert!(u.sqr().contains(&rat(17, 30)));
        // clamps
        assert_eq!(u_qr(2, &r, &RealBall::exact(int(0), 64), 64).unwrap().exact_value(), Some(&int(2)));
        assert_eq!(u_qr(3, &md(&[1, 1]), &RealBall::exact(int(2), 64), 64).unwrap().exact_value(), Some(&int(0)));
    }

    #[test]
    fn w_examples() {
        let r = md(&[12, 1]);
        let w = w_qr(2, &r, &rat(1, 5), 64).unwrap();
        // independent check: μ₂(w) on [1,2] is μ₂(2 − w) = s²/2 − s³/3 with s = 2 − w;
        // target μ₂(ũ) − 1/12 with ũ² = 17/30, μ₂(ũ) = ũ²/2 − ũ³/3
        let s = RealBall::exact(int(2), 64).sub(&w);
        let lhs = s.sqr().mul_q(&rat(1, 2)).sub(&s.powi(3).mul_q(&rat(1, 3)));
        let ut = RealBall::exact(rat(17, 30), 128).sqrt().unwrap();
        let rhs = ut.sqr().mul_q(&rat(1, 2)).sub(&ut.powi(3).mul_q(&rat(1, 3))).add_q(&rat(-1, 12));
        assert!(!lhs.sub(&rhs).gt(&RealBall::exact(rat(1, 1 << 40), 64)).is_true());
        assert!(w.contains(&rat(16034, 10000)) || (w.to_f64() - 1.6034).abs() < 1e-3);
        // peak: ε = 0 (q = 1) and ũ = n/2 gives w = n/2
        let w0 = w_qr(1, &md(&[1, 1]), &rat(1, 2), 64).unwrap();
        assert_eq!(w0.exact_value(), Some(&int(1)));
        assert!(matches!(w_qr(3, &md(&[4, 2, 1]), &rat(1, 100), 64), Err(Error::DomainError(_)) | Err(Error::HypothesisFailed(_))));
        assert!(matches!(w_qr(2, &md(&[2, 1]), &rat(1, 100), 64), Err(Error::HypothesisFailed(_))));
    }

    #[test]
    fn concentration_small_range() {
        for q in 2..=5 {
            for n in 2..=8 {
                assert!(concentration_holds(q, n, 64).unwrap().is_true(), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn first_piece_is_closed_form_poly() {
        let p = mu_poly(3).unwrap();
        assert_eq!(eval_rational(&p.pieces()[0], &rat(1, 2)), rat(1, 48) * (int(1) - rat(1, 4)));
    }

    proptest! {
        #[test]
        fn mu_symmetric(n in 1usize..=6, a in 0i64..=600, b in 1i64..=100) {
            let t = rat(a, b);
            prop_assume!(t <= int(n as i64));
            prop_assert_eq!(mu(n, &t).unwrap(), mu(n, &(int(n as i64) - &t)).unwrap());
            prop_assert!(mu(n, &t).unwrap() >= Rational::zero());
        }

        #[test]
        fn vol_symmetric(n in 1usize..=6, a in 0i64..=600, b in 1i64..=100) {
            let t = rat(a, b);
            prop_assume!(t <= int(n as i64));
            prop_assert_eq!(vol_lower(n, &t).unwrap() + vol_lower(n, &(int(n as i64) - &t)).unwrap(), int(1));
        }
    }
}
