//! Hermitian and lattice norms on spaces of multihomogeneous sections,
//! Pluecker heights of section subspaces, the two height upper bounds for
//! kernels, the explicit destabilizing group elements g^(σ) and the
//! instability-measure bounds evaluated at them.
//!
//! Archimedean convention: the monomials T(ℓ) are orthogonal with
//! ‖T(ℓ)‖² = ∏ C(rᵢ, ℓᵢ)⁻¹, and ‖v₁ ∧ … ∧ v_k‖² is the Gram determinant.
//! Finite places use the max of the p-adic absolute values of the
//! coefficients, and on exterior powers the max over the Pluecker
//! coordinates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::combinatorics::{lattice_points, MultiDegree, Side, DEFAULT_LATTICE_LIMIT};
use crate::exactnum::ball::ln_rational;
use crate::exactnum::linalg::{det, determinantal_divisor, padic_pivot_valuations, complex_det};
use crate::exactnum::place::{abs_value, Place};
use crate::exactnum::rational::{binomial, factorial, from_bigint, int, int_valuation, rat, Rational};
use crate::exactnum::{ComplexBall, Embedding, PadicBall, RealBall, Verdict};
use crate::heights::{distance_v, height, LocalPoint, ProjPoint};
use crate::sections::{kernel_conjugates, kernel_single, monomials, MultiHomogPoly, SectionSubspace};
use crate::{Error, Result};

mod permutation;

pub use permutation::{permutation_norm_check, PermutationNormReport, DEFAULT_PERMUTATION_LIMIT};

/// Budget of Pluecker coordinates enumerated for the coordinate cross-check.
pub const DEFAULT_MAX_PLUCKER: u128 = 1_000_000;

fn ser_big<S: serde::Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

/// Norm data on Γ(P, O(r)) in the monomial basis of `monomials(r)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HermitianStructure {
    r: MultiDegree,
    /// ‖T(ℓ)‖² at the archimedean place, in monomial order.
    #[serde(with = "crate::exactnum::rational::serde_rational_vec")]
    weights: Vec<Rational>,
}

impl HermitianStructure {
    pub fn new(r: &MultiDegree) -> HermitianStructure {
        let weights = monomials(r).iter().map(|l| monomial_norm_sq(r, l)).collect();
        HermitianStructure { r: r.clone(), weights }
    }

    pub fn r(&self) -> &MultiDegree {
        &self.r
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    fn check_len(&self, v: &[Rational]) -> Result<()> {
        if v.len() != self.weights.len() {
            return Err(Error::DegreeMismatch(format!(
                "vector of length {} against {} monomials",
                v.len(),
                self.weights.len()
            )));
        }
        Ok(())
    }

    /// Archimedean inner product of two real coefficient vectors.
    pub fn inner(&self, u: &[Rational], v: &[Rational]) -> Result<Rational> {
        self.check_len(u)?;
        self.check_len(v)?;
        Ok(u.iter().zip(v).zip(&self.weights).fold(Rational::zero(), |acc, ((a, b), w)| acc + a * b * w))
    }

    pub fn norm_sq(&self, u: &[Rational]) -> Result<Rational> {
        self.inner(u, u)
    }

    /// Max of the p-adic absolute values of the coefficients.
    pub fn finite_norm(&self, u: &[Rational], v: &Place) -> Result<Rational> {
        self.check_len(u)?;
        if v.is_archimedean() {
            return Err(Error::InvalidInput("finite_norm needs a finite place".into()));
        }
        Ok(u.iter().map(|c| abs_value(v, c)).max().unwrap_or_else(Rational::zero))
    }

    pub fn gram(&self, rows: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
        rows.iter().map(|u| rows.iter().map(|v| self.inner(u, v)).collect()).collect()
    }

    /// ‖v₁ ∧ … ∧ v_k‖² at the archimedean place.
    pub fn wedge_norm_sq(&self, rows: &[Vec<Rational>]) -> Result<Rational> {
        if rows.is_empty() {
            return Ok(Rational::one());
        }
        Ok(det(&self.gram(rows)?, &Rational::zero()))
    }
}

/// ∏ C(rᵢ, ℓᵢ)⁻¹.
pub fn monomial_norm_sq(r: &MultiDegree, l: &[u64]) -> Rational {
    let c = r.degrees().iter().zip(l).fold(BigInt::one(), |acc, (&ri, &li)| acc * binomial(ri, li));
    Rational::new(BigInt::one(), c)
}

/// Archimedean ‖f‖² of a rational section.
pub fn section_norm_sq(f: &MultiHomogPoly<Rational>) -> Rational {
    f.terms().iter().fold(Rational::zero(), |acc, (l, c)| acc + c * c * monomial_norm_sq(f.r(), l))
}

/// Each row scaled by the lcm of its denominators over the gcd of its
/// numerators: a primitive integral row spanning the same line.
fn primitive_rows(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let ints: Vec<BigInt> = row.iter().map(|c| (c * from_bigint(l.clone())).to_integer()).collect();
            let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
            if g.is_zero() {
                ints
            } else {
                ints.into_iter().map(|c| c / &g).collect()
            }
        })
        .collect()
}

/// Fraction-free (Bareiss) determinant of a square integer matrix.
fn int_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * &a[n - 1][n - 1]
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// One Pluecker coordinate: the maximal minor on the listed columns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PluckerCoordinate {
    pub columns: Vec<usize>,
    #[serde(serialize_with = "ser_big")]
    pub value: BigInt,
}

/// All nonzero maximal minors of the primitive integral basis of `w`.
pub fn plucker_coordinates(w: &SectionSubspace, limit: u128) -> Result<Vec<PluckerCoordinate>> {
    let rows = primitive_rows(w.basis());
    let (k, n) = (w.dim(), w.ambient_dim());
    let count = binomial_u128(n, k);
    if count > limit {
        return Err(Error::SizeLimit { count, limit });
    }
    let mut out = Vec::new();
    let mut cols: Vec<usize> = (0..k).collect();
    loop {
        let m: Vec<Vec<BigInt>> = rows.iter().map(|row| cols.iter().map(|&j| row[j].clone()).collect()).collect();
        let d = int_det(m);
        if !d.is_zero() {
            out.push(PluckerCoordinate { columns: cols.clone(), value: d });
        }
        // next k-subset in lexicographic order
        let Some(i) = (0..k).rev().find(|&i| cols[i] < n - k + i) else {
            return Ok(out);
        };
        cols[i] += 1;
        for j in i + 1..k {
            cols[j] = cols[j - 1] + 1;
        }
    }
}

/// Height of the point [W] of the grassmannian, split by place type.
#[derive(Clone, Debug, Serialize)]
pub struct PluckerReport {
    pub check: &'static str,
    pub dim: usize,
    pub ambient_dim: usize,
    /// Gram determinant of the primitive integral basis.
    #[serde(with = "crate::exactnum::rational::serde_rational")]
    pub gram_det: Rational,
    /// gcd of the Pluecker coordinates of the primitive integral basis.
    #[serde(serialize_with = "ser_big")]
    pub content: BigInt,
    /// ½ log of the Gram determinant.
    pub archimedean: RealBall,
    /// Σ_p log ‖w‖_p = −log content.
    pub finite: RealBall,
    pub height: RealBall,
    /// Whether the value was recomputed from explicit Pluecker coordinates.
    pub coordinates_checked: bool,
}

/// Pluecker height with the Gram and Smith-form route; when the number of
/// coordinates is at most `max_coordinates`, the value is recomputed from the
/// coordinates (Cauchy–Binet sum and their gcd) and compared exactly.
pub fn plucker_report(w: &SectionSubspace, h: &HermitianStructure, max_coordinates: u128, prec: u32) -> Result<PluckerReport> {
    if w.r() != h.r() {
        return Err(Error::DegreeMismatch("subspace and norm data have different multidegrees".into()));
    }
    if w.dim() == 0 {
        return Err(Error::ZeroSubspace);
    }
    let rows = primitive_rows(w.basis());
    let qrows: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().cloned().map(from_bigint).collect()).collect();
    let gram_det = h.wedge_norm_sq(&qrows)?;
    let content = determinantal_divisor(&rows);
    if !gram_det.is_positive() || content.is_zero() {
        return Err(Error::InternalMismatch("basis of a subspace is not independent".into()));
    }
    let coordinates_checked = binomial_u128(w.ambient_dim(), w.dim()) <= max_coordinates;
    if coordinates_checked {
        let coords = plucker_coordinates(w, max_coordinates)?;
        let mut sum = Rational::zero();
        let mut g = BigInt::zero();
        for c in &coords {
            let wt = c.columns.iter().fold(Rational::one(), |acc, &j| acc * &h.weights()[j]);
            sum += from_bigint(&c.value * &c.value) * wt;
            g = g.gcd(&c.value);
        }
        if sum != gram_det || g != content {
            return Err(Error::InternalMismatch(format!(
                "Pluecker coordinates give ({sum}, {g}), Gram and Smith routes give ({gram_det}, {content})"
            )));
        }
    }
    let half = rat(1, 2);
    let archimedean = ln_rational(&gram_det, prec).mul_q(&half);
    let finite = ln_rational(&from_bigint(content.clone()), prec).neg();
    let height = archimedean.add(&finite);
    Ok(PluckerReport {
        check: "pluecker-height",
        dim: w.dim(),
        ambient_dim: w.ambient_dim(),
        gram_det,
        content,
        archimedean,
        finite,
        height,
        coordinates_checked,
    })
}

pub fn plucker_height(w: &SectionSubspace, h: &HermitianStructure, prec: u32) -> Result<RealBall> {
    Ok(plucker_report(w, h, DEFAULT_MAX_PLUCKER, prec)?.height)
}

/// Σᵢ (Σ_{ℓ ∈ ▽_r(t)} ℓᵢ) for each factor i, with ▽ = {Σ ℓᵢ/rᵢ ≥ t}.
pub fn kernel_exponent_sums(r: &MultiDegree, t: &Rational) -> Result<Vec<u64>> {
    let mut s = vec![0u64; r.n()];
    for l in lattice_points(r, t, Side::Upper, DEFAULT_LATTICE_LIMIT)? {
        for (acc, li) in s.iter_mut().zip(&l) {
            *acc += li;
        }
    }
    Ok(s)
}

fn check_arity(pts: &[ProjPoint], r: &MultiDegree) -> Result<()> {
    if pts.len() != r.n() {
        return Err(Error::DegreeMismatch(format!("{} points for {} factors", pts.len(), r.n())));
    }
    Ok(())
}

/// Upper bound Σᵢ Σ_{ℓ ∈ ▽_r(t)} ℓᵢ h(xᵢ) for the height of K_r(x, t).
pub fn ub_height_rational(x: &[ProjPoint], r: &MultiDegree, t_x: &Rational, prec: u32) -> Result<RealBall> {
    check_arity(x, r)?;
    let s = kernel_exponent_sums(r, t_x)?;
    let mut acc = RealBall::zero(prec);
    for (xi, si) in x.iter().zip(s) {
        acc = acc.add(&height(xi, prec)?.mul_q(&int(si as i64)));
    }
    Ok(acc)
}

/// Upper bound (∏(rᵢ+1) − k)(q Σ rᵢ h(aᵢ) + |r| log √(2q)) for the height of
/// K_{q,r}(a, t), with q = [K′ : Q] and k its dimension (computed when not
/// supplied).
pub fn ub_height_algebraic(a: &[ProjPoint], r: &MultiDegree, t_a: &Rational, k: Option<usize>, prec: u32) -> Result<RealBall> {
    check_arity(a, r)?;
    let q = a
        .first()
        .and_then(ProjPoint::field)
        .map_or(1, |f| f.degree()) as i64;
    let k = match k {
        Some(k) => k,
        None => kernel_conjugates(a, r, t_a)?.dim(),
    };
    let n = r.box_size() as i64;
    if k as i64 > n {
        return Err(Error::InvalidInput(format!("dimension {k} exceeds the box size {n}")));
    }
    let mut sum = RealBall::zero(prec);
    for (ai, &ri) in a.iter().zip(r.degrees()) {
        sum = sum.add(&height(ai, prec)?.mul_q(&int(ri as i64)));
    }
    let tail = ln_rational(&int(2 * q), prec).mul_q(&rat(r.total() as i64, 2));
    Ok(sum.mul_q(&int(q)).add(&tail).mul_q(&int(n - k as i64)))
}

/// RHS Σ bᵢ μ̂ᵢ − ½ Σ |bᵢ| log rkᵢ of the lower bound for the height of an
/// invariant quotient of a tensor product of hermitian bundles with slopes
/// μ̂ᵢ and ranks rkᵢ.
pub fn quotient_lb(b: &[i64], ranks: &[u64], slopes: &[Rational], prec: u32) -> Result<RealBall> {
    if b.len() != ranks.len() || b.len() != slopes.len() {
        return Err(Error::InvalidInput("exponents, ranks and slopes need equal lengths".into()));
    }
    if ranks.contains(&0) {
        return Err(Error::InvalidInput("ranks must be positive".into()));
    }
    let mut acc = RealBall::zero(prec);
    for ((&bi, &ei), mu) in b.iter().zip(ranks).zip(slopes) {
        acc = acc.add_q(&(int(bi) * mu));
        acc = acc.sub(&ln_rational(&int(ei as i64), prec).mul_q(&rat(bi.abs(), 2)));
    }
    Ok(acc)
}

/// ½ (log k_a! + log k_x!): the gap between the Gram exterior norm and the
/// quotient norm on the two exterior powers.
pub fn factorial_correction(k_a: u64, k_x: u64, prec: u32) -> RealBall {
    let p = from_bigint(factorial(k_a) * factorial(k_x));
    ln_rational(&p, prec).mul_q(&rat(1, 2))
}

// ---------------------------------------------------------------------------
// Group elements at a place.

/// Ring operations shared by complex and p-adic balls.
trait Local: Clone {
    fn plus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
}

impl Local for ComplexBall {
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn zero_like(&self) -> Self {
        ComplexBall::zero(self.prec())
    }
    fn one_like(&self) -> Self {
        ComplexBall::one(self.prec())
    }
}

impl Local for PadicBall {
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn zero_like(&self) -> Self {
        PadicBall::exact_integer(self.prime(), BigInt::zero())
    }
    fn one_like(&self) -> Self {
        PadicBall::exact_integer(self.prime(), BigInt::one())
    }
}

/// A 2×2 matrix over C_v.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum LocalMatrix {
    Complex([[ComplexBall; 2]; 2]),
    Padic([[PadicBall; 2]; 2]),
}

/// A point of P¹(C_v) with a representative of v-norm 1.
#[derive(Clone, Debug)]
enum UnitPoint {
    Complex(ComplexBall, ComplexBall),
    Padic(PadicBall, PadicBall),
}

fn padic_digits(p: &BigInt, prec: u32) -> i64 {
    (prec as f64 / (p.bits() as f64 - 1.0).max(1.0)).ceil() as i64 + 8
}

fn unit_point(z: &LocalPoint, v: &Place, prec: u32) -> Result<UnitPoint> {
    let pt = match (z, v) {
        (LocalPoint::Rational(a, b), Place::Archimedean) => {
            UnitPoint::Complex(ComplexBall::from_rational(a, prec), ComplexBall::from_rational(b, prec))
        }
        (LocalPoint::Rational(a, b), Place::Finite(p)) => {
            let d = padic_digits(p, prec);
            UnitPoint::Padic(PadicBall::from_rational(p, a, d), PadicBall::from_rational(p, b, d))
        }
        (LocalPoint::Complex(a, b), Place::Archimedean) => UnitPoint::Complex(a.clone(), b.clone()),
        (LocalPoint::Padic(a, b), Place::Finite(p)) if a.prime() == p && b.prime() == p => {
            UnitPoint::Padic(a.clone(), b.clone())
        }
        _ => return Err(Error::InvalidInput(format!("local point does not live over the place {v}"))),
    };
    Ok(match pt {
        UnitPoint::Complex(a, b) => {
            let n = a.norm_sqr().add(&b.norm_sqr()).sqrt()?.inv()?;
            UnitPoint::Complex(a.mul_real(&n), b.mul_real(&n))
        }
        UnitPoint::Padic(a, b) => {
            let p = a.prime().clone();
            let va = a.valuation()?;
            let vb = b.valuation()?;
            let m = match (va, vb) {
                (Some(x), Some(y)) => x.min(y),
                (Some(x), None) | (None, Some(x)) => x,
                (None, None) => return Err(Error::InvalidInput("(0:0) is not a projective point".into())),
            };
            let s = if m >= 0 {
                Rational::new(BigInt::one(), num_traits::pow(p.clone(), m as usize))
            } else {
                from_bigint(num_traits::pow(p.clone(), (-m) as usize))
            };
            let d = padic_digits(&p, prec);
            UnitPoint::Padic(a.mul_rational(&s, d), b.mul_rational(&s, d))
        }
    })
}

/// The element g = (a₀x₁ − a₁x₀)⁻¹ [[x₁, −x₀], [−a₁, a₀]] of GL₂(C_v) built
/// from unit representatives of x and a. It sends the forms vanishing at x
/// and at a to multiples of T₁ and T₀ respectively.
#[derive(Clone, Debug, Serialize)]
pub struct GroupElement {
    pub place: Place,
    pub matrix: LocalMatrix,
    /// g⁻¹ = [[a₀, x₀], [a₁, x₁]]; sections transform by f ↦ f ∘ g⁻¹.
    pub inverse: LocalMatrix,
    /// |det g|_v computed from the entries of `matrix`.
    pub det_abs: RealBall,
    /// d_v(a, x) computed from the input representatives.
    pub distance: RealBall,
}

/// g^(σ) for the pair (x, a) at v; both points must live over v.
pub fn g_element(x: &LocalPoint, a: &LocalPoint, v: &Place, prec: u32) -> Result<GroupElement> {
    let distance = distance_v(x, a, v, prec)?;
    if distance.exact_value().is_some_and(Zero::is_zero) {
        return Err(Error::CoincidentPoints);
    }
    let (ux, ua) = (unit_point(x, v, prec)?, unit_point(a, v, prec)?);
    let (matrix, inverse, det_abs) = match (ux, ua) {
        (UnitPoint::Complex(x0, x1), UnitPoint::Complex(a0, a1)) => {
            let d = a0.mul(&x1).sub(&a1.mul(&x0));
            if d.contains_zero() {
                return Err(Error::CoincidentPoints);
            }
            let c = d.inv()?;
            let g = [[x1.mul(&c), x0.neg().mul(&c)], [a1.neg().mul(&c), a0.mul(&c)]];
            let det = g[0][0].mul(&g[1][1]).sub(&g[0][1].mul(&g[1][0]));
            let det_abs = det.abs()?;
            (LocalMatrix::Complex(g), LocalMatrix::Complex([[a0, x0], [a1, x1]]), det_abs)
        }
        (UnitPoint::Padic(x0, x1), UnitPoint::Padic(a0, a1)) => {
            let d = a0.mul(&x1).sub(&a1.mul(&x0));
            let digits = padic_digits(x0.prime(), prec);
            let c = d.inv(digits).map_err(|e| match e {
                Error::PrecisionExhausted(_) | Error::DomainError(_) => Error::CoincidentPoints,
                other => other,
            })?;
            let g = [[x1.mul(&c), x0.neg().mul(&c)], [a1.neg().mul(&c), a0.mul(&c)]];
            let det = g[0][0].mul(&g[1][1]).sub(&g[0][1].mul(&g[1][0]));
            let det_abs = RealBall::exact(det.abs()?, prec);
            (LocalMatrix::Padic(g), LocalMatrix::Padic([[a0, x0], [a1, x1]]), det_abs)
        }
        _ => return Err(Error::InternalMismatch("mixed local fields".into())),
    };
    Ok(GroupElement { place: v.clone(), matrix, inverse, det_abs, distance })
}

impl GroupElement {
    /// |det g|_v · d_v(a, x), which equals 1.
    pub fn det_identity(&self) -> RealBall {
        self.det_abs.mul(&self.distance)
    }

    /// m_v(a, x) = −log d_v(a, x).
    pub fn proximity(&self) -> Result<RealBall> {
        if let Some(q) = self.distance.exact_value() {
            return Ok(ln_rational(q, self.distance.prec()).neg());
        }
        Ok(self.distance.ln()?.neg())
    }

    /// ‖g·(y₀T₁ − y₁T₀)‖_v for a unit representative of y. The transformed
    /// form has coefficients (a₁y₀ − a₀y₁, x₁y₀ − x₀y₁), so the value is
    /// max(d(a, y), d(x, y)) at finite places and their euclidean norm at the
    /// archimedean place.
    pub fn dual_form_norm(&self, y: &LocalPoint, prec: u32) -> Result<RealBall> {
        match (&self.inverse, unit_point(y, &self.place, prec)?) {
            (LocalMatrix::Complex([[a0, x0], [a1, x1]]), UnitPoint::Complex(y0, y1)) => {
                let c0 = a1.mul(&y0).sub(&a0.mul(&y1));
                let c1 = x1.mul(&y0).sub(&x0.mul(&y1));
                c0.norm_sqr().add(&c1.norm_sqr()).sqrt()
            }
            (LocalMatrix::Padic([[a0, x0], [a1, x1]]), UnitPoint::Padic(y0, y1)) => {
                let c0 = a1.mul(&y0).sub(&a0.mul(&y1));
                let c1 = x1.mul(&y0).sub(&x0.mul(&y1));
                let n0 = c0.abs()?;
                let n1 = c1.abs()?;
                Ok(RealBall::exact(if n0 > n1 { n0 } else { n1 }, prec))
            }
            _ => Err(Error::InternalMismatch("mixed local fields".into())),
        }
    }
}

/// (ℓ, k) entry: coefficient of U₀^{r−k}U₁^k in (αU₀ + βU₁)^{r−ℓ}(γU₀ + δU₁)^ℓ.
fn local_substitution_matrix<L: Local>(r: u64, m: &[[L; 2]; 2]) -> Vec<Vec<L>> {
    let [[al, be], [ga, de]] = m;
    let n = r as usize + 1;
    let pow = |a: &L, b: &L, e: usize| -> Vec<L> {
        let mut v = vec![a.one_like()];
        for _ in 0..e {
            let mut next = vec![a.zero_like(); v.len() + 1];
            for (k, c) in v.iter().enumerate() {
                next[k] = next[k].plus(&c.times(a));
                next[k + 1] = next[k + 1].plus(&c.times(b));
            }
            v = next;
        }
        v
    };
    (0..n)
        .map(|l| {
            let (p, q) = (pow(al, be, n - 1 - l), pow(ga, de, l));
            let mut row = vec![al.zero_like(); n];
            for (i, a) in p.iter().enumerate() {
                for (j, b) in q.iter().enumerate() {
                    row[i + j] = row[i + j].plus(&a.times(b));
                }
            }
            row
        })
        .collect()
}

/// Applies f ↦ f ∘ g⁻¹ factor by factor to coefficient vectors in monomial
/// order.
fn transform_rows<L: Local>(rows: Vec<Vec<L>>, r: &MultiDegree, inverses: &[[[L; 2]; 2]]) -> Vec<Vec<L>> {
    let d = r.degrees();
    let mut rows = rows;
    for (i, m) in inverses.iter().enumerate() {
        let mat = local_substitution_matrix(d[i], m);
        // stride of factor i in lexicographic monomial order
        let stride: usize = d[i + 1..].iter().map(|&x| x as usize + 1).product();
        let block = stride * (d[i] as usize + 1);
        rows = rows
            .into_iter()
            .map(|u| {
                let mut out = vec![u[0].zero_like(); u.len()];
                for base in (0..u.len()).step_by(block) {
                    for s in 0..stride {
                        for l in 0..=d[i] as usize {
                            let c = &u[base + l * stride + s];
                            for (k, e) in mat[l].iter().enumerate() {
                                let t = &mut out[base + k * stride + s];
                                *t = t.plus(&c.times(e));
                            }
                        }
                    }
                }
                out
            })
            .collect();
    }
    rows
}

/// log(‖g·w‖_v / ‖w‖_v) for w the wedge of a basis of the subspace: a ball at
/// the archimedean place, an exact multiple c·log p at a finite place.
enum LogRatio {
    Real(RealBall),
    PowerOfP(i64),
}

fn log_norm_ratio(w: &SectionSubspace, h: &HermitianStructure, elems: &[GroupElement], prec: u32) -> Result<LogRatio> {
    let v = &elems[0].place;
    if w.dim() == 0 {
        return Ok(match v {
            Place::Archimedean => LogRatio::Real(RealBall::zero(prec)),
            Place::Finite(_) => LogRatio::PowerOfP(0),
        });
    }
    let rows = primitive_rows(w.basis());
    match v {
        Place::Archimedean => {
            let qrows: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().cloned().map(from_bigint).collect()).collect();
            let before = h.wedge_norm_sq(&qrows)?;
            let crow: Vec<Vec<ComplexBall>> = qrows
                .iter()
                .map(|r| r.iter().map(|c| ComplexBall::from_rational(c, prec)).collect())
                .collect();
            let inv: Vec<[[ComplexBall; 2]; 2]> = elems
                .iter()
                .map(|g| match &g.inverse {
                    LocalMatrix::Complex(m) => Ok(m.clone()),
                    LocalMatrix::Padic(_) => Err(Error::InternalMismatch("p-adic element at infinity".into())),
                })
                .collect::<Result<_>>()?;
            let u = transform_rows(crow, h.r(), &inv);
            let gram: Vec<Vec<ComplexBall>> = u
                .iter()
                .map(|a| {
                    u.iter()
                        .map(|b| {
                            a.iter().zip(b).zip(h.weights()).fold(ComplexBall::zero(prec), |acc, ((x, y), wt)| {
                                acc.add(&x.mul(&y.conj()).mul_q(wt))
                            })
                        })
                        .collect()
                })
                .collect();
            let after = complex_det(&gram)?.re;
            let ratio = after.mul_q(&before.recip());
            Ok(LogRatio::Real(ratio.ln()?.mul_q(&rat(1, 2))))
        }
        Place::Finite(p) => {
            let before = int_valuation(p, &determinantal_divisor(&rows)).expect("nonzero content") as i64;
            let prow: Vec<Vec<PadicBall>> = rows
                .iter()
                .map(|r| r.iter().map(|c| PadicBall::exact_integer(p, c.clone())).collect())
                .collect();
            let inv: Vec<[[PadicBall; 2]; 2]> = elems
                .iter()
                .map(|g| match &g.inverse {
                    LocalMatrix::Padic(m) => Ok(m.clone()),
                    LocalMatrix::Complex(_) => Err(Error::InternalMismatch("complex element at a finite place".into())),
                })
                .collect::<Result<_>>()?;
            let u = transform_rows(prow, h.r(), &inv);
            let after: i64 = padic_pivot_valuations(&u)?.iter().sum();
            Ok(LogRatio::PowerOfP(before - after))
        }
    }
}

/// ι_v evaluated at g^(σ) and g̃^(σ) = g^(σ)/θ^(σ) (θ² = det g) for the
/// single-point kernel K_r(x, t_x) and the conjugate kernel K_{q,r}(a, t_a),
/// against the stated upper bounds. At finite places every quantity is an
/// exact rational multiple of log p and is compared exactly.
#[derive(Clone, Debug, Serialize)]
pub struct IotaReport {
    pub check: &'static str,
    pub place: Place,
    pub embedding: usize,
    pub k_x: usize,
    pub k_a: usize,
    /// m_v(σ(aᵢ), xᵢ).
    pub proximities: Vec<RealBall>,
    /// |det gᵢ|_v · d_v(σ(aᵢ), xᵢ), each within 2^-96 of 1.
    pub det_identity: Vec<RealBall>,
    pub det_verdict: Verdict,
    pub iota_x: RealBall,
    pub bound_x: RealBall,
    pub verdict_x: Verdict,
    pub iota_a: RealBall,
    pub bound_a: RealBall,
    pub verdict_a: Verdict,
    /// ι at the determinant-one element: an upper bound for the instability
    /// measure at v.
    pub iota_normalized: RealBall,
    pub bound_normalized: RealBall,
    pub verdict_normalized: Verdict,
    pub slack: RealBall,
    pub verdict: Verdict,
}

/// Tolerance for the determinant identity.
fn det_tolerance() -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << 96)
}

/// The five quantities of the report, either as balls or as exact
/// coefficients of log p.
struct Sides<T> {
    iota_x: T,
    bound_x: T,
    iota_a: T,
    bound_a: T,
    shift: T,
}

#[allow(clippy::too_many_arguments)]
pub fn iota_bound_check(
    x: &[ProjPoint],
    a: &[ProjPoint],
    r: &MultiDegree,
    t_x: &Rational,
    t_a: &Rational,
    v: &Place,
    sigma: &Embedding,
    prec: u32,
) -> Result<IotaReport> {
    check_arity(x, r)?;
    check_arity(a, r)?;
    if sigma.place() != v {
        return Err(Error::InvalidInput(format!("embedding at place {} used at place {v}", sigma.place())));
    }
    let wp = prec + 64;
    let kx = kernel_single(x, r, t_x)?;
    let ka = kernel_conjugates(a, r, t_a)?;
    let mut elems = Vec::with_capacity(r.n());
    for (xi, ai) in x.iter().zip(a) {
        let xl = xi.localize(None, v, wp)?;
        let al = ai.localize(Some(sigma), v, wp)?;
        elems.push(g_element(&xl, &al, v, wp)?);
    }
    let proximities = elems.iter().map(GroupElement::proximity).collect::<Result<Vec<_>>>()?;
    let det_identity: Vec<RealBall> = elems.iter().map(GroupElement::det_identity).collect();
    let tol = det_tolerance();
    let det_verdict = Verdict::all(det_identity.iter().map(|d| {
        let lo = RealBall::exact(Rational::one() - &tol, wp);
        let hi = RealBall::exact(Rational::one() + &tol, wp);
        lo.le(d).and(d.le(&hi))
    }));

    let h = HermitianStructure::new(r);
    let (k_x, k_a) = (kx.dim(), ka.dim());
    let total = r.total() as i64;
    let sums = kernel_exponent_sums(r, t_x)?;
    let ratio_x = log_norm_ratio(&kx, &h, &elems, wp)?;
    let ratio_a = log_norm_ratio(&ka, &h, &elems, wp)?;
    let half_k = rat((k_x + k_a) as i64, 2);

    let (sides, verdicts) = match (v, ratio_x, ratio_a) {
        (Place::Finite(p), LogRatio::PowerOfP(ix), LogRatio::PowerOfP(ia)) => {
            // d_v = p^{-eᵢ}, so m_v = eᵢ log p
            let e: Vec<Rational> = elems
                .iter()
                .map(|g| {
                    let d = g.distance.exact_value().expect("finite distances are exact");
                    int(-crate::exactnum::rational::valuation(p, d).expect("nonzero distance"))
                })
                .collect();
            let bound_x = -sums.iter().zip(&e).fold(Rational::zero(), |acc, (s, ei)| acc + int(*s as i64) * ei);
            let rm = e.iter().enumerate().map(|(i, ei)| int(r.get(i) as i64) * ei).min().expect("n >= 1");
            let bound_a = -(rm * t_a * int(k_a as i64));
            let shift = e.iter().enumerate().fold(Rational::zero(), |acc, (i, ei)| acc + int(r.get(i) as i64) * ei) * &half_k;
            let (ix, ia) = (int(ix), int(ia));
            let verdicts = [
                Verdict::from_bool(ix <= bound_x),
                Verdict::from_bool(ia <= bound_a),
                Verdict::from_bool(&ix + &ia <= &bound_x + &bound_a),
            ];
            let lnp = ln_rational(&from_bigint(p.clone()), wp);
            let ball = |q: Rational| lnp.mul_q(&q);
            let sides = Sides {
                iota_x: ball(ix),
                bound_x: ball(bound_x),
                iota_a: ball(ia),
                bound_a: ball(bound_a),
                shift: ball(shift),
            };
            (sides, verdicts)
        }
        (Place::Archimedean, LogRatio::Real(iota_x), LogRatio::Real(iota_a)) => {
            let mut bound_x = RealBall::zero(wp);
            for (s, m) in sums.iter().zip(&proximities) {
                bound_x = bound_x.sub(&m.mul_q(&int(*s as i64)));
            }
            let mut rm = proximities[0].mul_q(&int(r.get(0) as i64));
            for (i, m) in proximities.iter().enumerate().skip(1) {
                rm = rm.min(&m.mul_q(&int(r.get(i) as i64)));
            }
            let mut bound_a = rm.mul_q(&(t_a * int(k_a as i64))).neg();
            bound_x = bound_x.add(&ln_rational(&int(2), wp).mul_q(&int(k_x as i64 * total)));
            let mut err = ln_rational(&int(3), wp).mul_q(&rat(total, 2));
            for &ri in r.degrees() {
                err = err.add(&ln_rational(&int(ri as i64 + 1), wp).mul_q(&rat(1, 2)));
            }
            bound_a = bound_a.add(&err.mul_q(&int(k_a as i64)));
            // g̃ = g/θ scales each transformed basis vector by |θ|^{|r|}, |θ|² = d⁻¹
            let mut shift = RealBall::zero(wp);
            for (i, m) in proximities.iter().enumerate() {
                shift = shift.add(&m.mul_q(&int(r.get(i) as i64)));
            }
            let shift = shift.mul_q(&half_k);
            let verdicts = [
                iota_x.le(&bound_x),
                iota_a.le(&bound_a),
                iota_x.add(&iota_a).add(&shift).le(&bound_x.add(&bound_a).add(&shift)),
            ];
            (Sides { iota_x, bound_x, iota_a, bound_a, shift }, verdicts)
        }
        _ => return Err(Error::InternalMismatch("norm ratio computed at the wrong place".into())),
    };
    let iota_normalized = sides.iota_x.add(&sides.iota_a).add(&sides.shift);
    let bound_normalized = sides.bound_x.add(&sides.bound_a).add(&sides.shift);
    let slack = bound_normalized.sub(&iota_normalized);
    let round = |b: RealBall| b.with_prec(prec);
    let [verdict_x, verdict_a, verdict_normalized] = verdicts;
    Ok(IotaReport {
        check: "instability-measure-bounds",
        place: v.clone(),
        embedding: sigma.index(),
        k_x,
        k_a,
        proximities: proximities.into_iter().map(round).collect(),
        det_identity,
        det_verdict,
        iota_x: round(sides.iota_x),
        bound_x: round(sides.bound_x),
        verdict_x,
        iota_a: round(sides.iota_a),
        bound_a: round(sides.bound_a),
        verdict_a,
        iota_normalized: round(iota_normalized),
        bound_normalized: round(bound_normalized),
        verdict_normalized,
        slack: round(slack),
        verdict: Verdict::all([det_verdict, verdict_x, verdict_a, verdict_normalized]),
    })
}
