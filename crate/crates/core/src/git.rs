//! One-parameter subgroups of SL₂ⁿ in diagonal normal form, instability
//! coefficients of lines and subspaces of sections, and the semi-stability
//! conditions built from them.
//!
//! Sign convention: λ(τ)·w = τ^{−μ} w_min + higher order, so a line spanned
//! by a vector whose lowest weight is p has μ = −p, and a subspace has
//! μ = −(sum of the jumps of its weight filtration).

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::combinatorics::{count_points, eps_pair, eps_qr, mu_ball, mu_z, u_qr, vol_lower_ball, MultiDegree, Side, DEFAULT_LATTICE_LIMIT};
use crate::exactnum::linalg::{rank, rref, row_space_intersection, row_space_sum};
use crate::exactnum::rational::{format_rational, int, parse_rational, Rational};
use crate::exactnum::{RealBall, Verdict};
use crate::heights::ProjPoint;
use crate::sections::{index, monomials, substitute_linear, IndexValue, MultiHomogPoly, SectionSubspace, Weight};
use crate::{Error, Result};

/// λ with weights mᵢ ≥ 0 and adapted bases: row i gives
/// T_{i0} = a T₀ + b T₁ and T_{i1} = c T₀ + d T₁ in the standard coordinates;
/// λ(τ) scales T_{i0} by τ^{mᵢ} and T_{i1} by τ^{−mᵢ}.
#[derive(Clone, Debug, PartialEq)]
pub struct OneParamSubgroup {
    m: Vec<u64>,
    bases: Vec<[[Rational; 2]; 2]>,
}

#[derive(Deserialize)]
struct OneParamRaw {
    m: Vec<u64>,
    #[serde(default)]
    bases: Option<Vec<[[String; 2]; 2]>>,
}

impl<'de> Deserialize<'de> for OneParamSubgroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = OneParamRaw::deserialize(d)?;
        let bases = match raw.bases {
            None => None,
            Some(bs) => {
                let mut out = Vec::new();
                for b in bs {
                    let p = |s: &String| parse_rational(s).map_err(serde::de::Error::custom);
                    out.push([[p(&b[0][0])?, p(&b[0][1])?], [p(&b[1][0])?, p(&b[1][1])?]]);
                }
                Some(out)
            }
        };
        let res = match bases {
            None => Ok(OneParamSubgroup::standard(raw.m)),
            Some(b) => OneParamSubgroup::new(raw.m, b),
        };
        res.map_err(serde::de::Error::custom)
    }
}

impl Serialize for OneParamSubgroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let bases: Vec<[[String; 2]; 2]> = self
            .bases
            .iter()
            .map(|b| [[format_rational(&b[0][0]), format_rational(&b[0][1])], [format_rational(&b[1][0]), format_rational(&b[1][1])]])
            .collect();
        serde_json::json!({"m": self.m, "bases": bases}).serialize(s)
    }
}

impl OneParamSubgroup {
    pub fn new(m: Vec<u64>, bases: Vec<[[Rational; 2]; 2]>) -> Result<Self> {
        if m.len() != bases.len() || m.is_empty() {
            return Err(Error::InvalidInput("one weight and one basis per factor".into()));
        }
        for b in &bases {
            if (&b[0][0] * &b[1][1] - &b[0][1] * &b[1][0]).is_zero() {
                return Err(Error::InvalidInput("adapted basis matrix is singular".into()));
            }
        }
        Ok(OneParamSubgroup { m, bases })
    }

    /// Adapted bases equal to the standard (T₀, T₁) on every factor.
    pub fn standard(m: Vec<u64>) -> Self {
        let id = [[Rational::one(), Rational::zero()], [Rational::zero(), Rational::one()]];
        let bases = vec![id; m.len()];
        OneParamSubgroup { m, bases }
    }

    pub fn weights(&self) -> &[u64] {
        &self.m
    }

    pub fn bases(&self) -> &[[[Rational; 2]; 2]] {
        &self.bases
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    /// ⟨m, r⟩.
    pub fn pairing(&self, r: &MultiDegree) -> i128 {
        self.m.iter().zip(r.degrees()).map(|(&a, &b)| a as i128 * b as i128).sum()
    }

    /// λ-weight of the adapted monomial with exponent ℓ: Σ mᵢ(rᵢ − 2ℓᵢ).
    pub fn monomial_weight(&self, r: &MultiDegree, l: &[u64]) -> i128 {
        self.m.iter().zip(r.degrees()).zip(l).map(|((&m, &r), &l)| m as i128 * (r as i128 - 2 * l as i128)).sum()
    }

    pub fn p_min(&self, r: &MultiDegree) -> i128 {
        -self.pairing(r)
    }

    pub fn p_max(&self, r: &MultiDegree) -> i128 {
        self.pairing(r)
    }

    /// y_λ: on factor i the zero of T_{i0} = aT₀ + bT₁, i.e. (−b : a).
    pub fn instability_point(&self) -> Vec<ProjPoint> {
        self.bases.iter().map(|b| ProjPoint::rational(&-&b[0][1], &b[0][0]).expect("row of an invertible matrix")).collect()
    }

    /// χ_{λ,i}(x) = 1 when T_{i0} vanishes at xᵢ; 0 when mᵢ = 0 by convention.
    pub fn chi(&self, x: &[ProjPoint]) -> Result<Vec<u8>> {
        if x.len() != self.n() {
            return Err(Error::DegreeMismatch("one point per factor is needed".into()));
        }
        x.iter()
            .zip(&self.bases)
            .zip(&self.m)
            .map(|((p, b), &m)| {
                let (x0, x1) = p.rational_coords().ok_or_else(|| Error::InvalidInput(format!("{p} is not a rational point")))?;
                Ok(u8::from(m != 0 && (&b[0][0] * x0 + &b[0][1] * x1).is_zero()))
            })
            .collect()
    }

    /// f rewritten in the adapted monomials U_{i0}^{rᵢ−kᵢ} U_{i1}^{kᵢ}.
    pub fn adapted(&self, f: &MultiHomogPoly<Rational>) -> MultiHomogPoly<Rational> {
        let mut g = f.clone();
        for (i, b) in self.bases.iter().enumerate() {
            // [T₀; T₁] = A⁻¹ [U₀; U₁]
            let det = &b[0][0] * &b[1][1] - &b[0][1] * &b[1][0];
            let inv = [[&b[1][1] / &det, -&b[0][1] / &det], [-&b[1][0] / &det, &b[0][0] / &det]];
            g = substitute_linear(&g, i, &inv);
        }
        g
    }
}

/// Result of an instability computation for a subspace.
#[derive(Clone, Debug, Serialize)]
pub struct InstabilityReport {
    pub check: &'static str,
    pub mu: i128,
    pub dim: usize,
    pub p_min: i128,
    pub p_max: i128,
    /// dim W[p] at each weight p carried by some monomial.
    pub filtration_dims: BTreeMap<i128, usize>,
}

fn weights_of(lambda: &OneParamSubgroup, r: &MultiDegree) -> Vec<i128> {
    monomials(r).iter().map(|l| lambda.monomial_weight(r, l)).collect()
}

/// Basis rows of W in adapted monomial coordinates.
fn adapted_rows(lambda: &OneParamSubgroup, w: &SectionSubspace) -> Vec<Vec<Rational>> {
    let zero = Rational::zero();
    w.sections().iter().map(|f| lambda.adapted(f).to_vector(&zero)).collect()
}

/// μ(λ, [W]) from the filtration W[p] = W ∩ ⊕_{q ≥ p} V_q, with
/// dim W[p] = dim W − rank(W projected to the coordinates of weight < p).
pub fn instab_subspace(lambda: &OneParamSubgroup, w: &SectionSubspace) -> Result<InstabilityReport> {
    if lambda.n() != w.r().n() {
        return Err(Error::DegreeMismatch("1-PS and sections live on different products".into()));
    }
    if w.dim() == 0 {
        return Err(Error::ZeroSubspace);
    }
    let r = w.r();
    let weights = weights_of(lambda, r);
    let rows = adapted_rows(lambda, w);
    let k = w.dim();
    let mut levels: Vec<i128> = weights.clone();
    levels.sort();
    levels.dedup();
    let mut dims = BTreeMap::new();
    for &p in &levels {
        let low: Vec<Vec<Rational>> =
            rows.iter().map(|v| v.iter().zip(&weights).filter(|(_, &wt)| wt < p).map(|(c, _)| c.clone()).collect()).collect();
        dims.insert(p, k - if low.first().is_some_and(|x| !x.is_empty()) { rank(&low) } else { 0 });
    }
    let dim_at = |p: i128| -> usize {
        // W[p] is constant between consecutive carried weights
        levels.iter().find(|&&q| q >= p).map_or(0, |q| dims[q])
    };
    let (p_min, p_max) = (lambda.p_min(r), lambda.p_max(r));
    // −p_min·dim W − Σ_{p_min < p ≤ p_max} dim W[p]
    let mut mu = -p_min * k as i128;
    let mut p = p_min + 1;
    while p <= p_max {
        mu -= dim_at(p) as i128;
        p += 1;
    }
    // −Σ_p p (dim W[p] − dim W[p+1]) over the carried weights
    let mut jumps = 0i128;
    for (j, &p) in levels.iter().enumerate() {
        let next = levels.get(j + 1).map_or(0, |q| dims[q]);
        jumps += p * (dims[&p] as i128 - next as i128);
    }
    if -jumps != mu {
        return Err(Error::InternalMismatch(format!("filtration sums disagree: {mu} vs {}", -jumps)));
    }
    Ok(InstabilityReport { check: "instability-coefficient-subspace", mu, dim: k, p_min, p_max, filtration_dims: dims })
}

/// μ(λ, [W]) as Σ μ(λ, [wᵢ]) over a basis with independent lowest-weight
/// components: row reduction with columns ordered by increasing weight.
pub fn instab_min_weight_basis(lambda: &OneParamSubgroup, w: &SectionSubspace) -> Result<i128> {
    if w.dim() == 0 {
        return Err(Error::ZeroSubspace);
    }
    let weights = weights_of(lambda, w.r());
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by_key(|&j| weights[j]);
    let mut rows: Vec<Vec<Rational>> =
        adapted_rows(lambda, w).into_iter().map(|v| order.iter().map(|&j| v[j].clone()).collect()).collect();
    let pivots = rref(&mut rows);
    // each row's lowest-weight component contains its pivot, and the pivot
    // columns form an identity block, so the components are independent
    Ok(rows
        .iter()
        .zip(&pivots)
        .map(|(row, _)| {
            let lowest = row.iter().zip(&order).filter(|(c, _)| !c.is_zero()).map(|(_, &j)| weights[j]).min().expect("nonzero row");
            -lowest
        })
        .sum())
}

/// Σᵢ (−1)^{χᵢ(x)} mᵢ μ^Z_{r,i}(t_x).
pub fn instab_kernel_closed_form(lambda: &OneParamSubgroup, x: &[ProjPoint], r: &MultiDegree, t_x: &Rational) -> Result<i128> {
    let chi = lambda.chi(x)?;
    let mut s = 0i128;
    for i in 0..r.n() {
        let m = lambda.weights()[i] as i128;
        if m == 0 {
            continue;
        }
        let term = m * mu_z(r, i + 1, t_x, DEFAULT_LATTICE_LIMIT)?;
        s += if chi[i] == 1 { -term } else { term };
    }
    Ok(s)
}

/// μ(λ, [f]) for a single section, computed as minus the lowest λ-weight in
/// adapted coordinates and as ⟨m, r⟩ − 2 ind_m(f, y_λ); the two must agree.
pub fn instab_line_via_index(lambda: &OneParamSubgroup, f: &MultiHomogPoly<Rational>) -> Result<i128> {
    if f.is_zero() {
        return Err(Error::ZeroSection);
    }
    let r = f.r();
    let g = lambda.adapted(f);
    let graded = -g.terms().keys().map(|l| lambda.monomial_weight(r, l)).min().expect("nonzero section");
    let b = Weight::new(lambda.weights().iter().map(|&m| int(m as i64)).collect())?;
    let ind = match index(f, &lambda.instability_point(), &b)? {
        IndexValue::Finite(x) => x,
        IndexValue::Infinite => return Err(Error::InternalMismatch("nonzero section with infinite index".into())),
    };
    let via_index = int(lambda.pairing(r) as i64) - int(2) * ind;
    if via_index != int(graded as i64) {
        return Err(Error::InternalMismatch(format!("graded weight gives {graded}, index gives {via_index}")));
    }
    Ok(graded)
}

/// Strict inequality μₙ(u_{q,r}(t_a)) > μₙ(t_x) + ε_{q,r}.
pub fn ss_condition(q: u64, r: &MultiDegree, t_a: &RealBall, t_x: &RealBall, prec: u32) -> Result<Verdict> {
    let n = r.n();
    let u = u_qr(q, r, t_a, prec)?;
    let lhs = mu_ball(n, &u)?;
    let rhs = mu_ball(n, t_x)?.add_q(&eps_qr(q, r));
    Ok(lhs.gt(&rhs))
}

/// Two-factor condition μ₂(t_x) < δ(1 − 2√(2(δ + ε))) with δ = 1 − q vol△₂(t_a)
/// and ε = q·min(r₁,r₂)/max(r₁,r₂) (the pair variant at q + 1), under the
/// hypothesis 0 ≤ δ + ε ≤ 1/2.
pub fn ss_condition_2d(q: u64, r1: u64, r2: u64, t_a: &RealBall, t_x: &RealBall, prec: u32) -> Result<Verdict> {
    if r1 < r2 {
        return Err(Error::InvalidInput(format!("needs r1 >= r2, got ({r1}, {r2})")));
    }
    let delta = vol_lower_ball(2, t_a)?.mul_q(&-int(q as i64)).add_q(&int(1));
    let bracket = delta.add_q(&eps_pair(q + 1, r1, r2)?);
    let zero = RealBall::zero(prec);
    let half = RealBall::exact(Rational::new(1.into(), 2.into()), prec);
    let hyp = bracket.ge(&zero).and(bracket.le(&half));
    if hyp.is_false() {
        return Err(Error::HypothesisFailed(format!("delta + eps = {bracket} outside [0, 1/2]")));
    }
    let root = bracket.clamp(&Rational::zero(), &Rational::one()).mul_q(&int(2)).sqrt()?;
    let rhs = delta.mul(&root.mul_q(&int(-2)).add_q(&int(1)));
    Ok(hyp.and(mu_ball(2, t_x)?.lt(&rhs)))
}

/// One line of the discrete condition check at a given α and factor.
#[derive(Clone, Debug, Serialize)]
pub struct SsPrimeRow {
    pub alpha: u64,
    pub factor: usize,
    pub lhs: Option<i128>,
    #[serde(with = "crate::exactnum::rational::serde_rational")]
    pub rhs: Rational,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct SsPrimeReport {
    pub check: &'static str,
    pub rows: Vec<SsPrimeRow>,
    pub verdict: Verdict,
}

/// For each α in the range and each factor i, checks
/// μ^Z_{αr,i}(u + ρ) > μ^Z_{αr,i}(t_x) + α^{n+1} rᵢ ∏r (ε + δ), where
/// u = u_{q,r}(t_a). The lattice set at u + ρ is taken from both ends of the
/// ball; if they differ the row is Unknown. α₀ itself is not derived.
#[allow(clippy::too_many_arguments)]
pub fn ss_prime_check(
    q: u64,
    r: &MultiDegree,
    t_a: &RealBall,
    t_x: &Rational,
    delta: &Rational,
    rho: &Rational,
    alphas: std::ops::RangeInclusive<u64>,
    prec: u32,
) -> Result<SsPrimeReport> {
    let n = r.n();
    let u = u_qr(q, r, t_a, prec)?;
    let eps = eps_qr(q, r);
    let mut rows = Vec::new();
    for alpha in alphas {
        let ra = r.scaled(alpha);
        let (lo, hi) = (u.lo() + rho, u.hi() + rho);
        let same = count_points(&ra, &lo, Side::Upper, DEFAULT_LATTICE_LIMIT)? == count_points(&ra, &hi, Side::Upper, DEFAULT_LATTICE_LIMIT)?;
        for i in 1..=n {
            let rhs = int(mu_z(&ra, i, t_x, DEFAULT_LATTICE_LIMIT)? as i64)
                + int(alpha.pow(n as u32 + 1) as i64) * int(r.get(i - 1) as i64) * int(r.product() as i64) * (&eps + delta);
            let (lhs, verdict) = if same {
                let l = mu_z(&ra, i, &lo, DEFAULT_LATTICE_LIMIT)?;
                (Some(l), Verdict::from_bool(int(l as i64) > rhs))
            } else {
                (None, Verdict::Unknown(prec))
            };
            rows.push(SsPrimeRow { alpha, factor: i, lhs, rhs, verdict });
        }
    }
    let verdict = Verdict::all(rows.iter().map(|r| r.verdict));
    Ok(SsPrimeReport { check: "discrete-semistability-condition", rows, verdict })
}

/// Both sides of the Grassmann inequality
/// μ(W₁) + μ(W₂) ≥ μ(W₁ + W₂) + μ(W₁ ∩ W₂).
#[derive(Clone, Debug, Serialize)]
pub struct GrassmannReport {
    pub check: &'static str,
    pub mu_w1: i128,
    pub mu_w2: i128,
    pub mu_sum: i128,
    pub mu_intersection: i128,
    pub verdict: Verdict,
}

pub fn grassmann_inequality_check(lambda: &OneParamSubgroup, w1: &SectionSubspace, w2: &SectionSubspace) -> Result<GrassmannReport> {
    if w1.r() != w2.r() {
        return Err(Error::DegreeMismatch("subspaces of different section spaces".into()));
    }
    let ncols = w1.ambient_dim();
    let zero = Rational::zero();
    let cap = SectionSubspace::span(w1.r().clone(), row_space_intersection(w1.basis(), w2.basis(), ncols, &zero))?;
    if cap.dim() == 0 {
        return Err(Error::DegenerateIntersection);
    }
    let sum = SectionSubspace::span(w1.r().clone(), row_space_sum(w1.basis(), w2.basis()))?;
    let (a, b) = (instab_subspace(lambda, w1)?.mu, instab_subspace(lambda, w2)?.mu);
    let (s, c) = (instab_subspace(lambda, &sum)?.mu, instab_subspace(lambda, &cap)?.mu);
    Ok(GrassmannReport {
        check: "grassmann-inequality",
        mu_w1: a,
        mu_w2: b,
        mu_sum: s,
        mu_intersection: c,
        verdict: Verdict::from_bool(a + b >= s + c),
    })
}

/// μ(W₁) ≥ μ(W₂) − p_min (dim W₁ − dim W₂) for W₁ ⊂ W₂; returns the slack.
pub fn inclusion_check(lambda: &OneParamSubgroup, w1: &SectionSubspace, w2: &SectionSubspace) -> Result<(Verdict, i128)> {
    if !w1.is_subspace_of(w2) {
        return Err(Error::InvalidInput("the first subspace is not contained in the second".into()));
    }
    let p_min = lambda.p_min(w1.r());
    let lhs = instab_subspace(lambda, w1)?.mu;
    let rhs = instab_subspace(lambda, w2)?.mu - p_min * (w1.dim() as i128 - w2.dim() as i128);
    Ok((Verdict::from_bool(lhs >= rhs), lhs - rhs))
}

/// True when every listed 1-PS gives μ ≥ 0; the semi-stability of W itself
/// would need all 1-PS, which this does not decide.
pub fn nonnegative_for_family(family: &[OneParamSubgroup], w: &SectionSubspace) -> Result<Vec<(i128, bool)>> {
    family.iter().map(|l| instab_subspace(l, w).map(|rep| (rep.mu, rep.mu >= 0))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::t_qn;
    use crate::exactnum::rational::rat;
    use crate::sections::{kernel_single, random_section};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn md(r: &[u64]) -> MultiDegree {
        MultiDegree::new(r.to_vec()).unwrap()
    }

    fn basis(a: i64, b: i64, c: i64, d: i64) -> [[Rational; 2]; 2] {
        [[int(a), int(b)], [int(c), int(d)]]
    }

    #[test]
    fn subspace_examples() {
        let r = md(&[2, 2]);
        let lam = OneParamSubgroup::standard(vec![1, 1]);
        let f = MultiHomogPoly::monomial(r.clone(), vec![0, 0], int(1)).unwrap();
        let w = SectionSubspace::span(r.clone(), vec![f.to_vector(&Rational::zero())]).unwrap();
        let rep = instab_subspace(&lam, &w).unwrap();
        assert_eq!(rep.mu, -4);
        assert_eq!(instab_line_via_index(&lam, &f).unwrap(), -4);
        let full = kernel_single(&[ProjPoint::ints(1, 1), ProjPoint::ints(1, 1)], &r, &int(0)).unwrap();
        assert_eq!(instab_subspace(&lam, &full).unwrap().mu, 0);
        let ker = kernel_single(&[ProjPoint::ints(1, 1), ProjPoint::ints(1, 2)], &r, &int(1)).unwrap();
        assert_eq!(instab_subspace(&lam, &ker).unwrap().mu, 8);
    }

    #[test]
    fn closed_form_examples() {
        let r = md(&[2, 2]);
        let lam = OneParamSubgroup::standard(vec![1, 1]);
        let away = [ProjPoint::ints(1, 1), ProjPoint::ints(1, 1)];
        assert_eq!(instab_kernel_closed_form(&lam, &away, &r, &int(1)).unwrap(), 8);
        // T₀ vanishes at (0:1) on both factors
        let at_y = [ProjPoint::ints(0, 1), ProjPoint::ints(0, 1)];
        assert_eq!(instab_kernel_closed_form(&lam, &at_y, &r, &int(1)).unwrap(), -8);
        let ker = kernel_single(&at_y, &r, &int(1)).unwrap();
        assert_eq!(instab_subspace(&lam, &ker).unwrap().mu, -8);
        assert_eq!(instab_kernel_closed_form(&OneParamSubgroup::standard(vec![0, 0]), &away, &r, &int(1)).unwrap(), 0);
    }

    #[test]
    fn line_examples() {
        let r = md(&[2, 2]);
        let lam = OneParamSubgroup::standard(vec![1, 1]);
        // T₁² ⊗ T₁² has λ-weight −4; it does not vanish at y_λ = ((0:1), (0:1))
        let g = MultiHomogPoly::monomial(r.clone(), vec![2, 2], int(1)).unwrap();
        assert_eq!(instab_line_via_index(&lam, &g).unwrap(), 4);
        assert_eq!(instab_line_via_index(&OneParamSubgroup::standard(vec![0, 0]), &g).unwrap(), 0);
        assert!(matches!(instab_line_via_index(&lam, &MultiHomogPoly::zero(r)), Err(Error::ZeroSection)));
    }

    #[test]
    fn closed_form_matches_subspace_small_grid() {
        let pts = [ProjPoint::ints(1, 2), ProjPoint::ints(3, -1)];
        for r in [vec![1u64, 2], vec![3, 2]] {
            let r = md(&r);
            for m in [vec![1u64, 0], vec![2, 3]] {
                // bases chosen so that χ takes every pattern at the points
                for (b1, b2) in [(basis(1, 0, 0, 1), basis(1, 0, 0, 1)), (basis(2, -1, 0, 1), basis(1, 3, 1, 0))] {
                    let lam = OneParamSubgroup::new(m.clone(), vec![b1.clone(), b2.clone()]).unwrap();
                    for k in 0..=8 {
                        let t = rat(k, 4);
                        let ker = kernel_single(&pts, &r, &t).unwrap();
                        if ker.dim() == 0 {
                            continue;
                        }
                        assert_eq!(instab_subspace(&lam, &ker).unwrap().mu, instab_kernel_closed_form(&lam, &pts, &r, &t).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn ss_examples() {
        let r = md(&[12, 1]);
        let t_a = t_qn(2, 2, &rat(1, 5), 128).unwrap();
        assert!(ss_condition(2, &r, &t_a, &RealBall::exact(rat(17, 10), 128), 128).unwrap().is_true());
        assert!(ss_condition(2, &r, &t_a, &RealBall::exact(int(1), 128), 128).unwrap().is_false());
        // ε = 3 exceeds every value of μ₃
        for k in 0..=6 {
            assert!(ss_condition(3, &md(&[4, 2, 1]), &t_a, &RealBall::exact(rat(k, 2), 64), 64).unwrap().is_false());
        }
    }

    #[test]
    fn ss_2d_examples() {
        // δ = 0 and ε tiny: the bound is near 0, so nothing satisfies it
        let t_a = t_qn(2, 2, &int(0), 64).unwrap();
        for k in 0..=4 {
            let v = ss_condition_2d(2, 1_000_000, 1, &t_a, &RealBall::exact(rat(k, 2), 64), 64).unwrap();
            assert!(v.is_false());
        }
        // q = 2, r = (50,1): ε = 2/50; δ = 1/25 makes δ + ε = 2/25 and the bound exactly 1/125
        let t_a = t_qn(2, 2, &rat(1, 25), 128).unwrap();
        // μ₂(t) = t²/2 − t³/3 on [0,1]; μ₂(1/10) = 7/3000 < 1/125, μ₂(3/10) = 9/250 > 1/125
        assert!(ss_condition_2d(2, 50, 1, &t_a, &RealBall::exact(rat(1, 10), 128), 128).unwrap().is_true());
        assert!(ss_condition_2d(2, 50, 1, &t_a, &RealBall::exact(rat(3, 10), 128), 128).unwrap().is_false());
        let big = t_qn(2, 2, &rat(3, 5), 64).unwrap();
        assert!(matches!(ss_condition_2d(2, 50, 1, &big, &RealBall::exact(int(1), 64), 64), Err(Error::HypothesisFailed(_))));
    }

    #[test]
    fn ss_prime_runs() {
        let r = md(&[12, 1]);
        let t_a = t_qn(2, 2, &rat(1, 5), 128).unwrap();
        let rep = ss_prime_check(2, &r, &t_a, &rat(17, 10), &rat(1, 1000), &rat(1, 1000), 1..=2, 128).unwrap();
        assert_eq!(rep.rows.len(), 4);
    }

    #[test]
    fn grassmann_examples() {
        let r = md(&[2, 2]);
        let lam = OneParamSubgroup::new(vec![1, 2], vec![basis(1, 1, 0, 1), basis(1, 0, 2, 1)]).unwrap();
        let w = kernel_single(&[ProjPoint::ints(1, 1), ProjPoint::ints(1, 2)], &r, &int(1)).unwrap();
        let rep = grassmann_inequality_check(&lam, &w, &w).unwrap();
        assert_eq!(rep.mu_w1 + rep.mu_w2, rep.mu_sum + rep.mu_intersection);
        let e = |l: Vec<u64>| MultiHomogPoly::monomial(r.clone(), l, int(1)).unwrap().to_vector(&Rational::zero());
        let a = SectionSubspace::span(r.clone(), vec![e(vec![0, 0])]).unwrap();
        let b = SectionSubspace::span(r.clone(), vec![e(vec![1, 0])]).unwrap();
        assert!(matches!(grassmann_inequality_check(&lam, &a, &b), Err(Error::DegenerateIntersection)));
    }

    fn random_subspace(r: &MultiDegree, k: usize, rng: &mut ChaCha8Rng) -> SectionSubspace {
        let zero = Rational::zero();
        let rows = (0..k).map(|_| random_section(r, 0.5, 3, rng).to_vector(&zero)).collect();
        SectionSubspace::span(r.clone(), rows).unwrap()
    }

    fn random_lambda(n: usize, rng: &mut ChaCha8Rng) -> OneParamSubgroup {
        let bases = (0..n)
            .map(|_| loop {
                let b = basis(rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-2..=2));
                if !(&b[0][0] * &b[1][1] - &b[0][1] * &b[1][0]).is_zero() {
                    break b;
                }
            })
            .collect();
        OneParamSubgroup::new((0..n).map(|_| rng.gen_range(0..=3)).collect(), bases).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn three_algorithms_agree(seed in 0u64..100_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = md(&[rng.gen_range(1..=3), rng.gen_range(1..=3)]);
            let lam = random_lambda(2, &mut rng);
            let f = random_section(&r, 0.6, 4, &mut rng);
            prop_assume!(!f.is_zero());
            let line = SectionSubspace::span(r.clone(), vec![f.to_vector(&Rational::zero())]).unwrap();
            prop_assert_eq!(instab_subspace(&lam, &line).unwrap().mu, instab_line_via_index(&lam, &f).unwrap());
            let k = rng.gen_range(1..=4);
            let w = random_subspace(&r, k, &mut rng);
            prop_assume!(w.dim() > 0);
            prop_assert_eq!(instab_subspace(&lam, &w).unwrap().mu, instab_min_weight_basis(&lam, &w).unwrap());
        }

        #[test]
        fn inclusion_and_grassmann_hold(seed in 0u64..100_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = md(&[2, 2]);
            let lam = random_lambda(2, &mut rng);
            let w2 = random_subspace(&r, 5, &mut rng);
            let sub = SectionSubspace::span(r.clone(), w2.basis()[..2.min(w2.dim())].to_vec()).unwrap();
            prop_assume!(sub.dim() > 0);
            prop_assert!(inclusion_check(&lam, &sub, &w2).unwrap().0.is_true());
            let w3 = random_subspace(&r, 6, &mut rng);
            match grassmann_inequality_check(&lam, &w2, &w3) {
                Ok(rep) => prop_assert!(rep.verdict.is_true()),
                Err(Error::DegenerateIntersection) => {}
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }
}
