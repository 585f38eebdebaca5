//! Binary forms, tensorial rank of sections on P¹ × P¹, homogeneous
//! Wronskians and the two-weight Dyson inequality in dimension 2.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::combinatorics::{eps_pair, vol_lower, MultiDegree};
use crate::exactnum::linalg::{rank, rref};
use crate::exactnum::rational::{factorial, format_rational, from_bigint, int, Rational};
use crate::exactnum::Verdict;
use crate::heights::ProjPoint;
use crate::sections::{binary_substitution_matrix, index, multiplicity_at, same_point, IndexValue, MultiHomogPoly, Weight};
use crate::{Error, Result};

/// Σ c_ℓ T₀^{r−ℓ} T₁^ℓ; `coeffs[ℓ] = c_ℓ`, length r + 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Deserialize)]
#[serde(try_from = "Vec<String>")]
pub struct BinaryForm {
    coeffs: Vec<Rational>,
}

impl TryFrom<Vec<String>> for BinaryForm {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<BinaryForm> {
        BinaryForm::new(v.iter().map(|s| crate::exactnum::rational::parse_rational(s)).collect::<Result<_>>()?)
    }
}

impl Serialize for BinaryForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(format_rational))
    }
}

/// a·(a−1)⋯(a−k+1).
fn falling(a: u64, k: u64) -> Rational {
    (0..k).fold(Rational::one(), |acc, j| acc * int(a as i64 - j as i64))
}

impl BinaryForm {
    pub fn new(coeffs: Vec<Rational>) -> Result<BinaryForm> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("a binary form needs at least one coefficient".into()));
        }
        Ok(BinaryForm { coeffs })
    }

    pub fn zero(r: u64) -> BinaryForm {
        BinaryForm { coeffs: vec![Rational::zero(); r as usize + 1] }
    }

    /// T₀^{r−ℓ} T₁^ℓ.
    pub fn monomial(r: u64, l: u64) -> BinaryForm {
        let mut f = Self::zero(r);
        f.coeffs[l as usize] = Rational::one();
        f
    }

    pub fn degree(&self) -> u64 {
        self.coeffs.len() as u64 - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &BinaryForm) -> Result<BinaryForm> {
        if self.degree() != o.degree() {
            return Err(Error::DegreeMismatch(format!("forms of degree {} and {}", self.degree(), o.degree())));
        }
        Ok(BinaryForm { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn scale(&self, c: &Rational) -> BinaryForm {
        BinaryForm { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, o: &BinaryForm) -> BinaryForm {
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        BinaryForm { coeffs: out }
    }

    /// ∂^{a+b} / ∂T₀^a ∂T₁^b; the zero form of degree r − a − b when some
    /// exponent runs out, and an error when a + b > r.
    pub fn partial(&self, a: u64, b: u64) -> Result<BinaryForm> {
        let r = self.degree();
        if a + b > r {
            return Err(Error::DegreeMismatch(format!("order {} derivative of a degree {r} form", a + b)));
        }
        let mut out = Self::zero(r - a - b);
        for (l, c) in self.coeffs.iter().enumerate() {
            let l = l as u64;
            if c.is_zero() || l < b || r - l < a {
                continue;
            }
            out.coeffs[(l - b) as usize] += c * falling(r - l, a) * falling(l, b);
        }
        Ok(out)
    }

    /// f(αU₀ + βU₁, γU₀ + δU₁) written in the U monomials.
    pub fn substitute(&self, m: &[[Rational; 2]; 2]) -> BinaryForm {
        let mat = binary_substitution_matrix(self.degree(), m);
        let mut out = Self::zero(self.degree());
        for (l, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, e) in mat[l].iter().enumerate() {
                out.coeffs[k] += c * e;
            }
        }
        out
    }

    /// Order of vanishing at a point of P¹.
    pub fn multiplicity_at(&self, z: &ProjPoint) -> Result<u64> {
        multiplicity_at(&self.coeffs, z)
    }
}

/// Coefficient matrix C[ℓ₁][ℓ₂] of a section of O(r₁, r₂).
pub type BiCoeffs = Vec<Vec<Rational>>;

fn coefficient_matrix(f: &MultiHomogPoly<Rational>) -> Result<BiCoeffs> {
    if f.n() != 2 {
        return Err(Error::DegreeMismatch(format!("sections on P1 x P1 are needed, got {} factors", f.n())));
    }
    let (r1, r2) = (f.r().get(0) as usize, f.r().get(1) as usize);
    let mut c = vec![vec![Rational::zero(); r2 + 1]; r1 + 1];
    for (l, v) in f.terms() {
        c[l[0] as usize][l[1] as usize] = v.clone();
    }
    Ok(c)
}

fn section_of(c: &BiCoeffs) -> Result<MultiHomogPoly<Rational>> {
    let r = MultiDegree::new(vec![c.len() as u64 - 1, c[0].len() as u64 - 1])?;
    let terms = c.iter().enumerate().flat_map(|(i, row)| row.iter().enumerate().map(move |(j, v)| (vec![i as u64, j as u64], v.clone())));
    MultiHomogPoly::new(r, terms)
}

/// a ⊗ b as a coefficient matrix.
pub fn tensor(a: &BinaryForm, b: &BinaryForm) -> BiCoeffs {
    a.coeffs.iter().map(|x| b.coeffs.iter().map(|y| x * y).collect()).collect()
}

fn bi_mul(a: &BiCoeffs, b: &BiCoeffs) -> BiCoeffs {
    let (n1, n2) = (a.len() + b.len() - 1, a[0].len() + b[0].len() - 1);
    let mut out = vec![vec![Rational::zero(); n2]; n1];
    for (i, ra) in a.iter().enumerate() {
        for (j, x) in ra.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (k, rb) in b.iter().enumerate() {
                for (l, y) in rb.iter().enumerate() {
                    out[i + k][j + l] += x * y;
                }
            }
        }
    }
    out
}

fn bi_add(a: &BiCoeffs, b: &BiCoeffs) -> BiCoeffs {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect()
}

fn bi_partial(c: &BiCoeffs, d: [(u64, u64); 2]) -> Result<BiCoeffs> {
    let rows: Vec<BinaryForm> = c.iter().map(|row| BinaryForm { coeffs: row.clone() }.partial(d[1].0, d[1].1)).collect::<Result<_>>()?;
    let width = rows[0].coeffs.len();
    let mut out = Vec::new();
    for j in 0..width {
        let col = BinaryForm { coeffs: rows.iter().map(|r| r.coeffs[j].clone()).collect() }.partial(d[0].0, d[0].1)?;
        out.push(col.coeffs);
    }
    // out is indexed [ℓ₂][ℓ₁]; transpose back
    Ok((0..out[0].len()).map(|i| out.iter().map(|col| col[i].clone()).collect()).collect())
}

/// Determinant of a square matrix over a commutative ring by expansion along
/// rows, memoizing minors by their column set (O(2^ρ ρ) products).
fn det_by_minors<T: Clone>(m: &[Vec<T>], add: &impl Fn(&T, &T) -> T, mul: &impl Fn(&T, &T) -> T, neg: &impl Fn(&T) -> T) -> T {
    fn minor<T: Clone>(
        m: &[Vec<T>],
        row: usize,
        mask: u32,
        memo: &mut HashMap<u32, T>,
        add: &impl Fn(&T, &T) -> T,
        mul: &impl Fn(&T, &T) -> T,
        neg: &impl Fn(&T) -> T,
    ) -> T {
        let n = m.len();
        if row == n - 1 {
            return m[row][mask.trailing_zeros() as usize].clone();
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let mut acc: Option<T> = None;
        let mut pos = 0;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let sub = minor(m, row + 1, mask & !(1 << j), memo, add, mul, neg);
            let mut term = mul(&m[row][j], &sub);
            if pos % 2 == 1 {
                term = neg(&term);
            }
            acc = Some(match acc {
                None => term,
                Some(a) => add(&a, &term),
            });
            pos += 1;
        }
        let v = acc.expect("nonempty mask");
        memo.insert(mask, v.clone());
        v
    }
    assert!(!m.is_empty() && m.len() <= 31);
    let full = (1u32 << m.len()) - 1;
    minor(m, 0, full, &mut HashMap::new(), add, mul, neg)
}

/// ((r − ρ + 1)!/r!)^ρ.
fn normalization(r: u64, rho: u64) -> Rational {
    let base = from_bigint(factorial(r + 1 - rho)) / from_bigint(factorial(r));
    (0..rho).fold(Rational::one(), |acc, _| acc * &base)
}

/// Homogeneous Wronskian ((r−ρ+1)!/r!)^ρ det(∂^{ρ−1}f_ℓ/∂T₀^{ρ−j}∂T₁^{j−1}),
/// a form of degree ρ(r − ρ + 1).
pub fn wronskian_univ(forms: &[BinaryForm]) -> Result<BinaryForm> {
    let rho = forms.len() as u64;
    if rho == 0 {
        return Err(Error::InvalidInput("the Wronskian of an empty family".into()));
    }
    let r = forms[0].degree();
    if forms.iter().any(|f| f.degree() != r) {
        return Err(Error::DegreeMismatch("forms of different degrees".into()));
    }
    if rho > r + 1 {
        return Err(Error::DegreeMismatch(format!("{rho} forms of degree {r} are always dependent")));
    }
    let m: Vec<Vec<BinaryForm>> =
        (1..=rho).map(|j| forms.iter().map(|f| f.partial(rho - j, j - 1)).collect::<Result<_>>()).collect::<Result<_>>()?;
    let det = det_by_minors(&m, &|a: &BinaryForm, b: &BinaryForm| a.add(b).expect("same degree"), &|a, b| a.mul(b), &|a| a.scale(&int(-1)));
    Ok(det.scale(&normalization(r, rho)))
}

/// f = Σ_ℓ left_ℓ ⊗ right_ℓ with ρ terms and independent factor families.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankDecomposition {
    pub rho: usize,
    pub left: Vec<BinaryForm>,
    pub right: Vec<BinaryForm>,
}

impl RankDecomposition {
    /// Σ left_ℓ ⊗ right_ℓ.
    pub fn reassemble(&self) -> Result<MultiHomogPoly<Rational>> {
        let mut acc = tensor(&self.left[0], &self.right[0]);
        for (a, b) in self.left.iter().zip(&self.right).skip(1) {
            acc = bi_add(&acc, &tensor(a, b));
        }
        section_of(&acc)
    }
}

/// Tensorial rank of f ∈ Sym^{r₁} ⊗ Sym^{r₂}: the rank of its coefficient
/// matrix C, with C = C[:, pivots] · rref(C) as the factorization.
pub fn tensor_rank(f: &MultiHomogPoly<Rational>) -> Result<RankDecomposition> {
    if f.is_zero() {
        return Err(Error::ZeroSection);
    }
    let c = coefficient_matrix(f)?;
    let mut red = c.clone();
    let pivots = rref(&mut red);
    let left = pivots.iter().map(|&p| BinaryForm { coeffs: c.iter().map(|row| row[p].clone()).collect() }).collect();
    let right = red.into_iter().map(|coeffs| BinaryForm { coeffs }).collect();
    Ok(RankDecomposition { rho: pivots.len(), left, right })
}

/// The two univariate Wronskians of a decomposition and their tensor product,
/// which agrees with the determinant of the mixed partials ∂_ℓ f.
#[derive(Clone, Debug, Serialize)]
pub struct BivariateWronskian {
    pub check: &'static str,
    pub rho: usize,
    pub wr1: BinaryForm,
    pub wr2: BinaryForm,
    #[serde(serialize_with = "serialize_bi")]
    pub product: BiCoeffs,
}

fn serialize_bi<S: Serializer>(c: &BiCoeffs, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(c.iter().map(|row| row.iter().map(format_rational).collect::<Vec<_>>()))
}

/// ∏ᵢ((rᵢ−ρ+1)!/rᵢ!)^ρ · det(∂^{2(ρ−1)}_ℓ f) straight from the coefficients.
pub fn wronskian_direct(f: &MultiHomogPoly<Rational>, rho: usize) -> Result<BiCoeffs> {
    let c = coefficient_matrix(f)?;
    let (r1, r2) = (f.r().get(0), f.r().get(1));
    let rh = rho as u64;
    if rh == 0 || rh > r1.min(r2) + 1 {
        return Err(Error::DegreeMismatch(format!("rank {rho} impossible for degrees ({r1}, {r2})")));
    }
    let m: Vec<Vec<BiCoeffs>> = (1..=rh)
        .map(|l1| (1..=rh).map(|l2| bi_partial(&c, [(rh - l1, l1 - 1), (rh - l2, l2 - 1)])).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let det = det_by_minors(&m, &|a, b| bi_add(a, b), &bi_mul, &|a: &BiCoeffs| a.iter().map(|row| row.iter().map(|x| -x).collect()).collect());
    let norm = normalization(r1, rh) * normalization(r2, rh);
    Ok(det.into_iter().map(|row| row.into_iter().map(|x| x * &norm).collect()).collect())
}

/// Wr(f) as Wr₁ ⊗ Wr₂ from the decomposition, cross-checked against the
/// direct determinant.
pub fn wronskian_biv(f: &MultiHomogPoly<Rational>, dec: &RankDecomposition) -> Result<BivariateWronskian> {
    if f.is_zero() {
        return Err(Error::ZeroSection);
    }
    if dec.rho == 0 || dec.left.len() != dec.rho || dec.right.len() != dec.rho {
        return Err(Error::InvalidInput("decomposition lists must have rho entries".into()));
    }
    if &dec.reassemble()? != f {
        return Err(Error::InvalidInput("decomposition does not reproduce the section".into()));
    }
    let wr1 = wronskian_univ(&dec.left)?;
    let wr2 = wronskian_univ(&dec.right)?;
    let product = tensor(&wr1, &wr2);
    let direct = wronskian_direct(f, dec.rho)?;
    if direct != product {
        return Err(Error::InternalMismatch("Wr(f) differs from Wr1 (x) Wr2".into()));
    }
    Ok(BivariateWronskian { check: "wronskian-product", rho: dec.rho, wr1, wr2, product })
}

/// Both sides of ind_b(Wr(f), z) ≥ M((ρ−1)(2 − (ρ−1)/r₂) vol△₂(t) − ρ ε₂)
/// with M = max bᵢrᵢ, t = min(1, ind_b(f, z)/M), r₁ ≥ r₂ and
/// ε₂ = r₂/r₁. `swapped` records that the factors were exchanged to get
/// r₁ ≥ r₂.
#[derive(Clone, Debug, Serialize)]
pub struct WronskianIndexReport {
    pub check: &'static str,
    pub rho: usize,
    pub swapped: bool,
    #[serde(with = "crate::exactnum::rational::serde_rational")]
    pub t: Rational,
    #[serde(with = "crate::exactnum::rational::serde_rational")]
    pub lhs: Rational,
    #[serde(with = "crate::exactnum::rational::serde_rational")]
    pub rhs: Rational,
    pub verdict: Verdict,
}

fn max_weighted_degree(b: &Weight, r: &MultiDegree) -> Result<Rational> {
    let m = b.values().iter().zip(r.degrees()).map(|(x, &d)| x * int(d as i64)).max().expect("two factors");
    if m.is_zero() {
        return Err(Error::DomainError("the weight vanishes on every factor".into()));
    }
    Ok(m)
}

fn swap_factors(f: &MultiHomogPoly<Rational>) -> Result<MultiHomogPoly<Rational>> {
    let r = MultiDegree::new(vec![f.r().get(1), f.r().get(0)])?;
    MultiHomogPoly::new(r, f.terms().iter().map(|(l, c)| (vec![l[1], l[0]], c.clone())))
}

fn finite_index(f: &MultiHomogPoly<Rational>, z: &[ProjPoint], b: &Weight) -> Result<Rational> {
    match index(f, z, b)? {
        IndexValue::Finite(x) => Ok(x),
        IndexValue::Infinite => Err(Error::ZeroSection),
    }
}

pub fn wronskian_index_bound(f: &MultiHomogPoly<Rational>, z: &[ProjPoint], b: &Weight) -> Result<WronskianIndexReport> {
    if f.is_zero() {
        return Err(Error::ZeroSection);
    }
    if f.n() != 2 || z.len() != 2 || b.n() != 2 {
        return Err(Error::DegreeMismatch("the Wronskian bound lives on P1 x P1".into()));
    }
    let swapped = f.r().get(0) < f.r().get(1);
    let (f, z, b) = if swapped {
        (swap_factors(f)?, vec![z[1].clone(), z[0].clone()], Weight::new(vec![b.values()[1].clone(), b.values()[0].clone()])?)
    } else {
        (f.clone(), z.to_vec(), b.clone())
    };
    let r = f.r().clone();
    let (r1, r2) = (r.get(0), r.get(1));
    let big_m = max_weighted_degree(&b, &r)?;
    let ind = finite_index(&f, &z, &b)?;
    let t = (&ind / &big_m).min(Rational::one());
    let dec = tensor_rank(&f)?;
    let w = wronskian_biv(&f, &dec)?;
    // the index of a tensor product splits over the factors
    let lhs = &b.values()[0] * int(w.wr1.multiplicity_at(&z[0])? as i64) + &b.values()[1] * int(w.wr2.multiplicity_at(&z[1])? as i64);
    if w.wr1.degree() > 0 && w.wr2.degree() > 0 {
        let whole = section_of(&w.product)?;
        if finite_index(&whole, &z, &b)? != lhs {
            return Err(Error::InternalMismatch("index of Wr(f) differs from the sum over its factors".into()));
        }
    }
    let rho = int(dec.rho as i64);
    let rm1 = &rho - int(1);
    let coeff = &rm1 * (int(2) - &rm1 / int(r2 as i64));
    let rhs = &big_m * (coeff * vol_lower(2, &t)? - &rho * eps_pair(2, r1, r2)?);
    let verdict = Verdict::from_bool(lhs >= rhs);
    Ok(WronskianIndexReport { check: "wronskian-index-bound", rho: dec.rho, swapped, t, lhs, rhs, verdict })
}

/// Both sides of ind_b(f₁⊗f₂, z) ≤ max(bᵢ/cᵢ)·ind_c(f₁⊗f₂, z).
pub fn weight_comparison(f1: &BinaryForm, f2: &BinaryForm, z: &[ProjPoint], b: &Weight, c: &Weight) -> Result<(Rational, Rational, Verdict)> {
    if f1.is_zero() || f2.is_zero() {
        return Err(Error::ZeroSection);
    }
    if z.len() != 2 || b.n() != 2 || c.n() != 2 {
        return Err(Error::DegreeMismatch("two factors are needed".into()));
    }
    if c.values().iter().any(Zero::is_zero) {
        return Err(Error::DomainError("the comparison weight must be positive".into()));
    }
    let m = [f1.multiplicity_at(&z[0])?, f2.multiplicity_at(&z[1])?];
    let ind = |w: &Weight| -> Rational { w.values().iter().zip(m).map(|(x, k)| x * int(k as i64)).sum() };
    let ratio = b.values().iter().zip(c.values()).map(|(x, y)| x / y).max().expect("two factors");
    let (lhs, rhs) = (ind(b), ratio * ind(c));
    let v = Verdict::from_bool(lhs <= rhs);
    Ok((lhs, rhs, v))
}

/// Σ_{σ=0}^{q} vol△₂(t^{(σ)}) ≤ 1 + ε_{q+1} with ε_{q+1} = q·min(r)/max(r),
/// t^{(σ)} = min(1, ind_{1/r}(f, z^{(σ)})) for the targets and
/// t^{(0)} = min(1, ind_b(f, y)/max bᵢrᵢ).
#[derive(Clone, Debug, Serialize)]
pub struct TwoWeightReport {
    pub check: &'static str,
    pub q: usize,
    pub target_indices: Vec<IndexValue>,
    pub extra_index: IndexValue,
    #[serde(with = "crate::exactnum::rational::serde_rational")]
    pub lhs: Rational,
    #[serde(with = "crate::exactnum::rational::serde_rational")]
    pub rhs: Rational,
    pub verdict: Verdict,
}

fn check_projections(points: &[&[ProjPoint]]) -> Result<()> {
    for i in 0..2 {
        for s in 0..points.len() {
            for t in s + 1..points.len() {
                if same_point(&points[s][i], &points[t][i])? {
                    return Err(Error::ProjectionClash { factor: i + 1 });
                }
            }
        }
    }
    Ok(())
}

pub fn two_weight_inequality(f: &MultiHomogPoly<Rational>, targets: &[Vec<ProjPoint>], y: &[ProjPoint], b: &Weight) -> Result<TwoWeightReport> {
    if f.is_zero() {
        return Err(Error::ZeroSection);
    }
    if f.n() != 2 || y.len() != 2 || b.n() != 2 || targets.iter().any(|z| z.len() != 2) {
        return Err(Error::DegreeMismatch("the two-weight inequality lives on P1 x P1".into()));
    }
    if targets.is_empty() {
        return Err(Error::InvalidInput("at least one target point is needed".into()));
    }
    let mut all: Vec<&[ProjPoint]> = vec![y];
    all.extend(targets.iter().map(Vec::as_slice));
    check_projections(&all)?;
    let r = f.r().clone();
    let recip = Weight::reciprocal(&r);
    let mut lhs = Rational::zero();
    let mut target_indices = Vec::new();
    for z in targets {
        let ind = finite_index(f, z, &recip)?;
        lhs += vol_lower(2, &ind.clone().min(Rational::one()))?;
        target_indices.push(IndexValue::Finite(ind));
    }
    let ind_y = finite_index(f, y, b)?;
    lhs += vol_lower(2, &(&ind_y / max_weighted_degree(b, &r)?).min(Rational::one()))?;
    let q = targets.len();
    let rhs = Rational::one() + eps_pair(q as u64 + 1, r.get(0), r.get(1))?;
    let verdict = Verdict::from_bool(lhs <= rhs);
    Ok(TwoWeightReport { check: "two-weight-dyson-inequality", q, target_indices, extra_index: IndexValue::Finite(ind_y), lhs, rhs, verdict })
}

/// Conclusion of the two-weight Dyson lemma: under ind_{1/r}(f, z^{(σ)}) ≤ 1
/// and B := 1 − Σ vol△₂(ind_{1/r}(f, z^{(σ)})) + ε_{q+1} < 1/2, the index at y
/// satisfies ind_b(f, y) < M and vol△₂(ind_b(f, y)/M) ≤ B.
#[derive(Clone, Debug, Serialize)]
pub struct TwoWeightDysonReport {
    pub check: &'static str,
    pub inequality: TwoWeightReport,
    #[serde(with = "crate::exactnum::rational::serde_rational")]
    pub bound: Rational,
    #[serde(with = "crate::exactnum::rational::serde_rational")]
    pub max_weighted_degree: Rational,
    pub index_below_max: Verdict,
    pub volume_bound: Verdict,
    pub verdict: Verdict,
}

pub fn two_weight_dyson(f: &MultiHomogPoly<Rational>, targets: &[Vec<ProjPoint>], y: &[ProjPoint], b: &Weight) -> Result<TwoWeightDysonReport> {
    let inequality = two_weight_inequality(f, targets, y, b)?;
    let r = f.r().clone();
    let mut sum = Rational::zero();
    for ind in &inequality.target_indices {
        let t = ind.finite().expect("finite");
        if t > &Rational::one() {
            return Err(Error::HypothesisFailed(format!("target index {t} exceeds 1")));
        }
        sum += vol_lower(2, t)?;
    }
    let bound = Rational::one() - sum + eps_pair(inequality.q as u64 + 1, r.get(0), r.get(1))?;
    if bound >= Rational::new(1.into(), 2.into()) {
        return Err(Error::HypothesisFailed(format!("1 - sum vol + eps = {bound} is not below 1/2")));
    }
    let m = max_weighted_degree(b, &r)?;
    let ind_y = inequality.extra_index.finite().expect("finite").clone();
    let index_below_max = Verdict::from_bool(ind_y < m);
    let volume_bound = Verdict::from_bool(vol_lower(2, &(&ind_y / &m))? <= bound);
    let verdict = index_below_max.and(volume_bound);
    Ok(TwoWeightDysonReport {
        check: "two-weight-dyson-lemma",
        inequality,
        bound,
        max_weighted_degree: m,
        index_below_max,
        volume_bound,
        verdict,
    })
}

/// Exponent e with Wr_{T′} = det(A)^e · Wr_T when T′ = A·T: the Wronskian
/// map is equivariant up to the character det^{ρ(ρ−1)/2}, which a weight
/// count confirms (ρr in, ρ(r−ρ+1) out, the gap ρ(ρ−1) split over two
/// variables).
pub fn basis_change_exponent(rho: u64) -> i64 {
    -((rho * (rho.saturating_sub(1)) / 2) as i64)
}

fn inverse2(m: &[[Rational; 2]; 2]) -> Result<([[Rational; 2]; 2], Rational)> {
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    if det.is_zero() {
        return Err(Error::InvalidInput("singular basis change".into()));
    }
    Ok(([[&m[1][1] / &det, -&m[0][1] / &det], [-&m[1][0] / &det, &m[0][0] / &det]], det))
}

/// Wronskian computed in the basis T′ = A·T (Tᵢ′ = Σⱼ A[i][j] Tⱼ), returned
/// in the original monomials.
pub fn wronskian_in_basis(forms: &[BinaryForm], a: &[[Rational; 2]; 2]) -> Result<BinaryForm> {
    let (ainv, _) = inverse2(a)?;
    // T = A⁻¹T′ gives the coefficients of each form in the T′ monomials
    let primed: Vec<BinaryForm> = forms.iter().map(|f| f.substitute(&ainv)).collect();
    let w = wronskian_univ(&primed)?;
    Ok(w.substitute(a))
}

/// g acting on forms by (g·f)(T) = f(g⁻¹T).
pub fn act(g: &[[Rational; 2]; 2], f: &BinaryForm) -> Result<BinaryForm> {
    Ok(f.substitute(&inverse2(g)?.0))
}

/// Wr(g·f₁, …, g·f_ρ) and g·Wr(f₁, …, f_ρ); equal when det g = 1.
pub fn equivariance_sides(g: &[[Rational; 2]; 2], forms: &[BinaryForm]) -> Result<(BinaryForm, BinaryForm)> {
    let moved: Vec<BinaryForm> = forms.iter().map(|f| act(g, f)).collect::<Result<_>>()?;
    Ok((wronskian_univ(&moved)?, act(g, &wronskian_univ(forms)?)?))
}

/// Wr with respect to T′ = A·T and det(A)^e·Wr; equal for every invertible A.
pub fn covariance_sides(a: &[[Rational; 2]; 2], forms: &[BinaryForm]) -> Result<(BinaryForm, BinaryForm)> {
    let (_, det) = inverse2(a)?;
    let e = basis_change_exponent(forms.len() as u64);
    let factor = if e >= 0 { pow(&det, e as u64) } else { Rational::one() / pow(&det, (-e) as u64) };
    Ok((wronskian_in_basis(forms, a)?, wronskian_univ(forms)?.scale(&factor)))
}

fn pow(x: &Rational, e: u64) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

/// Exact linear dependence test for the Wronski criterion cross-check.
pub fn forms_independent(forms: &[BinaryForm]) -> bool {
    let rows: Vec<Vec<Rational>> = forms.iter().map(|f| f.coeffs.clone()).collect();
    rank(&rows) == forms.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;
    use crate::sections::{kernel_single, random_section};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bf(c: &[i64]) -> BinaryForm {
        BinaryForm::new(c.iter().map(|&x| int(x)).collect()).unwrap()
    }

    fn md(r: &[u64]) -> MultiDegree {
        MultiDegree::new(r.to_vec()).unwrap()
    }

    fn sec(r: &[u64], terms: &[(&[u64], i64)]) -> MultiHomogPoly<Rational> {
        MultiHomogPoly::new(md(r), terms.iter().map(|(l, c)| (l.to_vec(), int(*c)))).unwrap()
    }

    fn random_form(r: u64, rng: &mut ChaCha8Rng) -> BinaryForm {
        BinaryForm { coeffs: (0..=r).map(|_| int(rng.gen_range(-4..=4))).collect() }
    }

    fn random_matrix(rng: &mut ChaCha8Rng, unimodular: bool) -> [[Rational; 2]; 2] {
        loop {
            let e = |rng: &mut ChaCha8Rng| rat(rng.gen_range(-5..=5), rng.gen_range(1..=3));
            let (a, b, c) = (e(rng), e(rng), e(rng));
            if unimodular {
                // d = (1 + bc)/a
                if a.is_zero() {
                    continue;
                }
                let d = (Rational::one() + &b * &c) / &a;
                return [[a, b], [c, d]];
            }
            let d = e(rng);
            if !(&a * &d - &b * &c).is_zero() {
                return [[a, b], [c, d]];
            }
        }
    }

    #[test]
    fn univariate_examples() {
        assert_eq!(wronskian_univ(&[bf(&[1, 0]), bf(&[0, 1])]).unwrap(), bf(&[1]));
        assert_eq!(wronskian_univ(&[bf(&[1, 0, 0]), bf(&[0, 0, 1])]).unwrap(), bf(&[0, 1, 0]));
        assert!(wronskian_univ(&[bf(&[1, 2, 3]), bf(&[1, 2, 3])]).unwrap().is_zero());
        assert_eq!(wronskian_univ(&[bf(&[3, 1])]).unwrap(), bf(&[3, 1]));
        assert!(matches!(wronskian_univ(&[bf(&[1]), bf(&[2])]), Err(Error::DegreeMismatch(_))));
        assert!(matches!(wronskian_univ(&[bf(&[1, 0]), bf(&[1])]), Err(Error::DegreeMismatch(_))));
    }

    #[test]
    fn rank_examples() {
        let f = sec(&[1, 1], &[(&[0, 0], 1), (&[1, 0], 1)]);
        assert_eq!(tensor_rank(&f).unwrap().rho, 1);
        let g = sec(&[1, 1], &[(&[0, 0], 1), (&[1, 1], 1)]);
        let d = tensor_rank(&g).unwrap();
        assert_eq!(d.rho, 2);
        assert_eq!(d.reassemble().unwrap(), g);
        assert!(matches!(tensor_rank(&MultiHomogPoly::zero(md(&[1, 1]))), Err(Error::ZeroSection)));
    }

    #[test]
    fn bivariate_examples() {
        let f = sec(&[2, 2], &[(&[0, 0], 1), (&[2, 2], 1)]);
        let w = wronskian_biv(&f, &tensor_rank(&f).unwrap()).unwrap();
        assert_eq!(w.wr1, bf(&[0, 1, 0]));
        assert_eq!(w.wr2, bf(&[0, 1, 0]));
        let g = section_of(&tensor(&bf(&[1, 2, 0]), &bf(&[0, 3, 0, -1]))).unwrap();
        let d = tensor_rank(&g).unwrap();
        assert_eq!(d.rho, 1);
        assert_eq!(section_of(&wronskian_biv(&g, &d).unwrap().product).unwrap(), g);
        // degree-zero Wronskian: ρ = r + 1
        let h = sec(&[1, 1], &[(&[0, 0], 1), (&[1, 1], 1)]);
        let w = wronskian_biv(&h, &tensor_rank(&h).unwrap()).unwrap();
        assert_eq!((w.wr1.degree(), w.wr2.degree()), (0, 0));
    }

    #[test]
    fn index_bound_examples() {
        let f = sec(&[2, 2], &[(&[0, 0], 1), (&[2, 2], 1)]);
        let z = [ProjPoint::ints(1, 0), ProjPoint::ints(1, 0)];
        let b = Weight::new(vec![rat(1, 2), rat(1, 2)]).unwrap();
        let rep = wronskian_index_bound(&f, &z, &b).unwrap();
        // Wr = T₁₀T₁₁ ⊗ T₂₀T₂₁ vanishes once at (1:0) on each factor
        assert_eq!(rep.lhs, int(1));
        assert!(rep.verdict.is_true());
        let g = sec(&[3, 2], &[(&[1, 0], 1)]);
        let rep = wronskian_index_bound(&g, &z, &b).unwrap();
        assert_eq!(rep.rho, 1);
        assert!(rep.rhs <= Rational::zero());
        assert!(wronskian_index_bound(&sec(&[1, 3], &[(&[0, 0], 1), (&[1, 3], 1)]), &z, &b).unwrap().swapped);
    }

    #[test]
    fn covariance_exponent_examples() {
        assert_eq!(basis_change_exponent(1), 0);
        assert_eq!(basis_change_exponent(2), -1);
        assert_eq!(basis_change_exponent(4), -6);
        // scaling both variables by c: a single form is unchanged as an element
        let f = [bf(&[1, 2, 3])];
        let a = [[int(3), int(0)], [int(0), int(3)]];
        assert_eq!(wronskian_in_basis(&f, &a).unwrap(), wronskian_univ(&f).unwrap());
    }

    #[test]
    fn two_weight_examples() {
        let r = md(&[4, 2]);
        let z1 = vec![ProjPoint::ints(1, 1), ProjPoint::ints(1, 2)];
        let y = vec![ProjPoint::ints(1, 0), ProjPoint::ints(0, 1)];
        let f = kernel_single(&z1, &r, &rat(1, 2)).unwrap().sections()[0].clone();
        let b = Weight::new(vec![int(1), int(2)]).unwrap();
        assert!(two_weight_inequality(&f, std::slice::from_ref(&z1), &y, &b).unwrap().verdict.is_true());
        let clash = vec![ProjPoint::ints(1, 1), ProjPoint::ints(0, 1)];
        assert!(matches!(two_weight_inequality(&f, std::slice::from_ref(&z1), &clash, &b), Err(Error::ProjectionClash { factor: 1 })));
        // one target of index 1/2 leaves B = 1 − 1/8 + 1/2 ≥ 1/2
        assert!(matches!(two_weight_dyson(&f, &[z1], &y, &b), Err(Error::HypothesisFailed(_))));
    }

    #[test]
    fn two_weight_dyson_over_quadratic_points() {
        use crate::exactnum::{NumberField, Scalar};
        let k = NumberField::from_i64(&[-2, 0, 1]).unwrap();
        let s = k.theta();
        let r = md(&[10, 2]);
        // the conjugate pair ((1:√2),(1:√2)), ((1:−√2),(1:−√2))
        let a = vec![ProjPoint::algebraic(k.one(), s.clone()).unwrap(), ProjPoint::algebraic(k.one(), s.clone()).unwrap()];
        let conj = vec![ProjPoint::algebraic(k.one(), s.negated()).unwrap(), ProjPoint::algebraic(k.one(), s.negated()).unwrap()];
        // at t = 1 both targets give vol = 1/2, and ε = 2·2/10 keeps B = 2/5 < 1/2
        let w = crate::sections::kernel_conjugates(&a, &r, &int(1)).unwrap();
        assert!(w.dim() >= 3);
        let f = w.sections()[0].clone();
        let lam = crate::git::OneParamSubgroup::standard(vec![1, 1]);
        let y = lam.instability_point();
        let b = Weight::new(vec![int(1), int(1)]).unwrap();
        let rep = two_weight_dyson(&f, &[a, conj], &y, &b).unwrap();
        assert!(rep.verdict.is_true());
        assert!(rep.inequality.verdict.is_true());
    }

    #[test]
    fn weight_comparison_examples() {
        let z = [ProjPoint::ints(1, 0), ProjPoint::ints(1, 0)];
        // T₁ vanishes at (1:0): multiplicities (2, 1)
        let (l, r, v) = weight_comparison(&bf(&[0, 0, 1]), &bf(&[0, 1]), &z, &Weight::new(vec![int(1), int(3)]).unwrap(), &Weight::new(vec![int(1), int(1)]).unwrap()).unwrap();
        assert_eq!((l, r), (int(5), int(9)));
        assert!(v.is_true());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]
        #[test]
        fn wronski_criterion(seed in 0u64..1_000_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = rng.gen_range(1..=8u64);
            let rho = rng.gen_range(1..=(r + 1).min(5)) as usize;
            let mut forms: Vec<BinaryForm> = (0..rho).map(|_| random_form(r, &mut rng)).collect();
            if rho > 1 && rng.gen_bool(0.4) {
                // force a dependency
                let comb = forms[0].scale(&int(rng.gen_range(-3..=3))).add(&forms[rho - 1]).unwrap();
                forms[1] = comb;
            }
            let w = wronskian_univ(&forms).unwrap();
            prop_assert_eq!(w.degree(), rho as u64 * (r + 1 - rho as u64));
            prop_assert_eq!(!w.is_zero(), forms_independent(&forms));
        }

        #[test]
        fn equivariance_and_covariance(seed in 0u64..1_000_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = rng.gen_range(1..=6u64);
            let rho = rng.gen_range(1..=(r + 1).min(4)) as usize;
            let forms: Vec<BinaryForm> = (0..rho).map(|_| random_form(r, &mut rng)).collect();
            let g = random_matrix(&mut rng, true);
            let (a, b) = equivariance_sides(&g, &forms).unwrap();
            prop_assert_eq!(a, b);
            let m = random_matrix(&mut rng, false);
            let (a, b) = covariance_sides(&m, &forms).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn product_identity_and_index_bound(seed in 0u64..1_000_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = md(&[rng.gen_range(1..=6), rng.gen_range(1..=6)]);
            let f = random_section(&r, 0.5, 3, &mut rng);
            prop_assume!(!f.is_zero());
            let d = tensor_rank(&f).unwrap();
            prop_assert!(wronskian_biv(&f, &d).is_ok());
            let z = [ProjPoint::ints(rng.gen_range(0..=2), 1), ProjPoint::ints(1, rng.gen_range(-1..=1))];
            let b = Weight::new(vec![rat(rng.gen_range(0..=3), 2), rat(rng.gen_range(1..=3), 3)]).unwrap();
            prop_assert!(wronskian_index_bound(&f, &z, &b).unwrap().verdict.is_true());
        }

        #[test]
        fn two_weight_inequality_holds(seed in 0u64..1_000_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = md(&[rng.gen_range(2..=6), rng.gen_range(1..=4)]);
            let q = rng.gen_range(1..=2usize);
            // distinct projections: affine points (1:σ+1) and y at infinity
            let targets: Vec<Vec<ProjPoint>> = (0..q).map(|s| vec![ProjPoint::ints(1, s as i64 + 1), ProjPoint::ints(1, -(s as i64) - 1)]).collect();
            let y = vec![ProjPoint::ints(0, 1), ProjPoint::ints(rng.gen_range(0..=1), 1)];
            let t = rat(rng.gen_range(0..=6), 6);
            let mut w = kernel_single(&targets[0], &r, &t).unwrap();
            for z in &targets[1..] {
                let other = kernel_single(z, &r, &t).unwrap();
                let rows = crate::exactnum::linalg::row_space_intersection(w.basis(), other.basis(), w.ambient_dim(), &Rational::zero());
                w = crate::sections::SectionSubspace::span(r.clone(), rows).unwrap();
            }
            prop_assume!(w.dim() > 0);
            let coeffs: Vec<Rational> = (0..w.dim()).map(|_| int(rng.gen_range(-2..=2))).collect();
            let mut v = vec![Rational::zero(); w.ambient_dim()];
            for (c, row) in coeffs.iter().zip(w.basis()) {
                for (x, y) in v.iter_mut().zip(row) {
                    *x += c * y;
                }
            }
            let f = MultiHomogPoly::from_vector(r.clone(), &v).unwrap();
            prop_assume!(!f.is_zero());
            let b = Weight::new(vec![int(rng.gen_range(0..=3)), int(rng.gen_range(1..=3))]).unwrap();
            prop_assert!(two_weight_inequality(&f, &targets, &y, &b).unwrap().verdict.is_true());
        }
    }
}
