//! Multihomogeneous sections of O(r₁, …, rₙ) on (P¹)ⁿ, their index at a
//! point, kernels of "index at least t" conditions, and the Dyson inequality.
//!
//! A monomial is an exponent vector ℓ ∈ ∏[0, rᵢ] standing for
//! ∏ T_{i0}^{rᵢ−ℓᵢ} T_{i1}^{ℓᵢ}.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::combinatorics::{eps_qr, lattice_points, vol_lower, MultiDegree, Side, DEFAULT_LATTICE_LIMIT};
use crate::exactnum::field::automorphisms;
use crate::exactnum::linalg::{nullspace, rank, rref};
use crate::exactnum::rational::{binomial, format_rational, from_bigint, int, Rational};
use crate::exactnum::{FieldElem, NumberField, Scalar, Verdict};
use crate::heights::ProjPoint;
use crate::{Error, Result};

/// Coefficients that know how to print themselves in the section JSON format.
pub trait Coefficient: Scalar {
    fn to_json(&self) -> serde_json::Value;
}

impl Coefficient for Rational {
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }
}

impl Coefficient for FieldElem {
    fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("field elements serialize")
    }
}

/// All exponent vectors of the box, in lexicographic order.
pub fn monomials(r: &MultiDegree) -> Vec<Vec<u64>> {
    let mut out = Vec::with_capacity(r.box_size() as usize);
    let d = r.degrees();
    let mut l = vec![0u64; d.len()];
    loop {
        out.push(l.clone());
        let mut i = d.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if l[i] < d[i] {
                l[i] += 1;
                break;
            }
            l[i] = 0;
        }
    }
}

/// Position of ℓ in `monomials(r)`.
pub fn monomial_index(r: &MultiDegree, l: &[u64]) -> usize {
    l.iter().zip(r.degrees()).fold(0usize, |acc, (&li, &ri)| acc * (ri as usize + 1) + li as usize)
}

/// Section of O(r) with coefficients in Q or a number field. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiHomogPoly<S> {
    r: MultiDegree,
    terms: BTreeMap<Vec<u64>, S>,
}

impl<S: Coefficient> Serialize for MultiHomogPoly<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let terms: Vec<serde_json::Value> =
            self.terms.iter().map(|(l, c)| serde_json::json!({"l": l, "c": c.to_json()})).collect();
        let mut st = s.serialize_struct("MultiHomogPoly", 2)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

impl<S: Scalar> MultiHomogPoly<S> {
    pub fn new(r: MultiDegree, terms: impl IntoIterator<Item = (Vec<u64>, S)>) -> Result<Self> {
        let mut f = MultiHomogPoly { r, terms: BTreeMap::new() };
        for (l, c) in terms {
            if l.len() != f.r.n() || l.iter().zip(f.r.degrees()).any(|(a, b)| a > b) {
                return Err(Error::DegreeMismatch(format!("exponent {l:?} outside the box {:?}", f.r.degrees())));
            }
            f.add_term(l, c);
        }
        Ok(f)
    }

    pub fn zero(r: MultiDegree) -> Self {
        MultiHomogPoly { r, terms: BTreeMap::new() }
    }

    pub fn monomial(r: MultiDegree, l: Vec<u64>, c: S) -> Result<Self> {
        Self::new(r, [(l, c)])
    }

    /// Coefficients in `monomials(r)` order.
    pub fn from_vector(r: MultiDegree, v: &[S]) -> Result<Self> {
        let ms = monomials(&r);
        if ms.len() != v.len() {
            return Err(Error::DegreeMismatch(format!("vector of length {} for a box of size {}", v.len(), ms.len())));
        }
        Self::new(r, ms.into_iter().zip(v.iter().cloned()))
    }

    pub fn to_vector(&self, proto: &S) -> Vec<S> {
        let mut v = vec![proto.zero_like(); self.r.box_size() as usize];
        for (l, c) in &self.terms {
            v[monomial_index(&self.r, l)] = c.clone();
        }
        v
    }

    fn add_term(&mut self, l: Vec<u64>, c: S) {
        if c.vanishes() {
            return;
        }
        match self.terms.get_mut(&l) {
            Some(old) => {
                let s = old.plus(&c);
                if s.vanishes() {
                    self.terms.remove(&l);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(l, c);
            }
        }
    }

    pub fn r(&self) -> &MultiDegree {
        &self.r
    }

    pub fn n(&self) -> usize {
        self.r.n()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u64>, S> {
        &self.terms
    }

    pub fn coeff(&self, l: &[u64]) -> Option<&S> {
        self.terms.get(l)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.r != o.r {
            return Err(Error::DegreeMismatch("sum of sections of different degrees".into()));
        }
        let mut out = self.clone();
        for (l, c) in &o.terms {
            out.add_term(l.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.r.clone());
        for (l, a) in &self.terms {
            out.add_term(l.clone(), a.times(c));
        }
        out
    }

    /// Product; multidegrees add.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.n() != o.n() {
            return Err(Error::DegreeMismatch("product of sections on different products".into()));
        }
        let r = MultiDegree::new(self.r.degrees().iter().zip(o.r.degrees()).map(|(a, b)| a + b).collect())?;
        let mut out = Self::zero(r);
        for (l1, c1) in &self.terms {
            for (l2, c2) in &o.terms {
                out.add_term(l1.iter().zip(l2).map(|(a, b)| a + b).collect(), c1.times(c2));
            }
        }
        Ok(out)
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MultiHomogPoly<T> {
        let mut out = MultiHomogPoly::zero(self.r.clone());
        for (l, c) in &self.terms {
            out.add_term(l.clone(), f(c));
        }
        out
    }
}

impl MultiHomogPoly<Rational> {
    pub fn to_field(&self, k: &NumberField) -> MultiHomogPoly<FieldElem> {
        self.map_coeffs(|c| k.from_rational(c))
    }
}

/// Coefficient of U₀^{r−k}U₁^k in (αU₀ + βU₁)^{r−ℓ}(γU₀ + δU₁)^ℓ, as the
/// (ℓ, k) entry.
pub fn binary_substitution_matrix<S: Scalar>(r: u64, m: &[[S; 2]; 2]) -> Vec<Vec<S>> {
    let [[al, be], [ga, de]] = m;
    let n = r as usize + 1;
    let proto = al;
    // powers of the two linear forms as coefficient vectors in U₁-degree
    let pow = |a: &S, b: &S, e: usize| -> Vec<S> {
        let mut v = vec![proto.one_like()];
        for _ in 0..e {
            let mut next = vec![proto.zero_like(); v.len() + 1];
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
            let mut row = vec![proto.zero_like(); n];
            for (i, a) in p.iter().enumerate() {
                for (j, b) in q.iter().enumerate() {
                    row[i + j] = row[i + j].plus(&a.times(b));
                }
            }
            row
        })
        .collect()
}

/// Substitutes T_{i0} = αU₀ + βU₁, T_{i1} = γU₀ + δU₁ on factor i (0-based)
/// and returns the section in the U monomials.
pub fn substitute_linear<S: Scalar>(f: &MultiHomogPoly<S>, i: usize, m: &[[S; 2]; 2]) -> MultiHomogPoly<S> {
    let mat = binary_substitution_matrix(f.r.get(i), m);
    let mut out = MultiHomogPoly::zero(f.r.clone());
    for (l, c) in &f.terms {
        for (k, e) in mat[l[i] as usize].iter().enumerate() {
            let mut key = l.clone();
            key[i] = k as u64;
            out.add_term(key, c.times(e));
        }
    }
    out
}

/// Random section with integer coefficients in [-bound, bound]; each monomial
/// is present with probability `density`.
pub fn random_section(r: &MultiDegree, density: f64, bound: i64, rng: &mut impl Rng) -> MultiHomogPoly<Rational> {
    let mut terms = Vec::new();
    for l in monomials(r) {
        if rng.gen_bool(density) {
            terms.push((l, int(rng.gen_range(-bound..=bound))));
        }
    }
    MultiHomogPoly::new(r.clone(), terms).expect("monomials lie in the box")
}

/// Weight b = (b₁, …, bₙ) with bᵢ ≥ 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Weight {
    #[serde(with = "crate::exactnum::rational::serde_rational_vec")]
    b: Vec<Rational>,
}

impl Weight {
    pub fn new(b: Vec<Rational>) -> Result<Weight> {
        if b.iter().any(|x| x < &Rational::zero()) {
            return Err(Error::InvalidInput("weights must be nonnegative".into()));
        }
        Ok(Weight { b })
    }

    /// The weight 1/r = (1/r₁, …, 1/rₙ).
    pub fn reciprocal(r: &MultiDegree) -> Weight {
        Weight { b: r.degrees().iter().map(|&x| Rational::new(1.into(), (x as i64).into())).collect() }
    }

    pub fn values(&self) -> &[Rational] {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn dot(&self, l: &[u64]) -> Rational {
        self.b.iter().zip(l).map(|(b, &x)| b * int(x as i64)).sum()
    }
}

/// Value of an index: a rational or +∞ (for the zero section).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum IndexValue {
    Finite(Rational),
    Infinite,
}

impl IndexValue {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            IndexValue::Finite(x) => Some(x),
            IndexValue::Infinite => None,
        }
    }
}

impl Serialize for IndexValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            IndexValue::Finite(x) => s.serialize_str(&format_rational(x)),
            IndexValue::Infinite => s.serialize_str("+inf"),
        }
    }
}

impl std::ops::Add for IndexValue {
    type Output = IndexValue;
    fn add(self, o: IndexValue) -> IndexValue {
        match (self, o) {
            (IndexValue::Finite(a), IndexValue::Finite(b)) => IndexValue::Finite(a + b),
            _ => IndexValue::Infinite,
        }
    }
}

/// Local coordinate on one factor: U = T₁ − ξT₀ at (1:ξ), or T₀ at (0:1).
#[derive(Clone, Debug, PartialEq)]
pub enum Chart<S> {
    Affine(S),
    AtInfinity,
}

impl Chart<Rational> {
    pub fn of_rational(z: &ProjPoint) -> Result<Chart<Rational>> {
        let (x0, x1) = z.rational_coords().ok_or_else(|| Error::InvalidInput(format!("{z} is not a rational point")))?;
        Ok(if x0.is_zero() { Chart::AtInfinity } else { Chart::Affine(x1 / x0) })
    }
}

impl Chart<FieldElem> {
    pub fn of_point(z: &ProjPoint, k: &NumberField) -> Result<Chart<FieldElem>> {
        let (x0, x1) = z.coords_in(k)?;
        Ok(match x0.checked_inv() {
            None => Chart::AtInfinity,
            Some(inv) => Chart::Affine(x1.times(&inv)),
        })
    }
}

/// Entry (ℓ, j) of the change of basis from T₀^{r−ℓ}T₁^ℓ to the local
/// monomials: C(ℓ,j)ξ^{ℓ−j} at (1:ξ), and [j = r − ℓ] at (0:1).
fn chart_matrix<S: Scalar>(chart: &Chart<S>, r: u64, proto: &S) -> Vec<Vec<S>> {
    let n = r as usize + 1;
    let mut m = vec![vec![proto.zero_like(); n]; n];
    match chart {
        Chart::AtInfinity => {
            for l in 0..n {
                m[l][n - 1 - l] = proto.one_like();
            }
        }
        Chart::Affine(xi) => {
            let mut pows = vec![proto.one_like()];
            for k in 1..n {
                pows.push(pows[k - 1].times(xi));
            }
            for l in 0..n {
                for j in 0..=l {
                    let c = proto.from_rational_like(&from_bigint(binomial(l as u64, j as u64)));
                    m[l][j] = c.times(&pows[l - j]);
                }
            }
        }
    }
    m
}

/// Coefficients of f in the local monomials at the chart point.
pub fn local_expansion<S: Scalar>(f: &MultiHomogPoly<S>, charts: &[Chart<S>]) -> Result<BTreeMap<Vec<u64>, S>> {
    if charts.len() != f.n() {
        return Err(Error::DegreeMismatch(format!("{} points for a section on {} factors", charts.len(), f.n())));
    }
    let mut cur = f.terms.clone();
    let Some(proto) = cur.values().next().cloned() else {
        return Ok(cur);
    };
    for (i, chart) in charts.iter().enumerate() {
        let m = chart_matrix(chart, f.r.get(i), &proto);
        let mut next: BTreeMap<Vec<u64>, S> = BTreeMap::new();
        for (l, c) in &cur {
            for (j, e) in m[l[i] as usize].iter().enumerate() {
                if e.vanishes() {
                    continue;
                }
                let mut key = l.clone();
                key[i] = j as u64;
                let v = c.times(e);
                let slot = next.entry(key).or_insert_with(|| proto.zero_like());
                *slot = slot.plus(&v);
            }
        }
        next.retain(|_, v| !v.vanishes());
        cur = next;
    }
    Ok(cur)
}

/// ind_b(f, z) from charts in the coefficient field.
pub fn index_at<S: Scalar>(f: &MultiHomogPoly<S>, charts: &[Chart<S>], b: &Weight) -> Result<IndexValue> {
    if b.n() != f.n() {
        return Err(Error::DegreeMismatch("weight length differs from the number of factors".into()));
    }
    let local = local_expansion(f, charts)?;
    Ok(local.keys().map(|l| b.dot(l)).min().map_or(IndexValue::Infinite, IndexValue::Finite))
}

/// The number field shared by the algebraic points, if any.
fn common_field(points: &[ProjPoint]) -> Result<Option<NumberField>> {
    let mut k: Option<NumberField> = None;
    for p in points {
        if let Some(f) = p.field() {
            match &k {
                None => k = Some(f.clone()),
                Some(g) if g != f => return Err(Error::InvalidInput("points live in different number fields".into())),
                _ => {}
            }
        }
    }
    Ok(k)
}

/// ind_b(f, z) for a rational section at points over Q or one number field,
/// computed with exact arithmetic in that field.
pub fn index(f: &MultiHomogPoly<Rational>, z: &[ProjPoint], b: &Weight) -> Result<IndexValue> {
    match common_field(z)? {
        None => {
            let charts = z.iter().map(Chart::of_rational).collect::<Result<Vec<_>>>()?;
            index_at(f, &charts, b)
        }
        Some(k) => {
            let charts = z.iter().map(|p| Chart::of_point(p, &k)).collect::<Result<Vec<_>>>()?;
            index_at(&f.to_field(&k), &charts, b)
        }
    }
}

/// Subspace of sections, stored as a canonical reduced row echelon basis in
/// the monomial coordinates of `monomials(r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionSubspace<S = Rational> {
    r: MultiDegree,
    basis: Vec<Vec<S>>,
}

impl<S: Scalar> SectionSubspace<S> {
    /// Span of the given rows.
    pub fn span(r: MultiDegree, rows: Vec<Vec<S>>) -> Result<Self> {
        let n = r.box_size() as usize;
        if rows.iter().any(|v| v.len() != n) {
            return Err(Error::DegreeMismatch("row length differs from the box size".into()));
        }
        let mut basis = rows;
        rref(&mut basis);
        Ok(SectionSubspace { r, basis })
    }

    pub fn r(&self) -> &MultiDegree {
        &self.r
    }

    pub fn basis(&self) -> &[Vec<S>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.r.box_size() as usize
    }

    pub fn sections(&self) -> Vec<MultiHomogPoly<S>> {
        self.basis.iter().map(|v| MultiHomogPoly::from_vector(self.r.clone(), v).expect("row fits the box")).collect()
    }

    pub fn contains(&self, f: &MultiHomogPoly<S>) -> bool {
        let Some(proto) = f.terms.values().next() else {
            return true;
        };
        let mut rows = self.basis.clone();
        rows.push(f.to_vector(proto));
        rank(&rows) == self.dim()
    }

    pub fn is_subspace_of(&self, o: &Self) -> bool {
        let mut rows = o.basis.clone();
        rows.extend(self.basis.iter().cloned());
        rank(&rows) == o.dim()
    }
}

/// Rows of the linear conditions "the local coefficient at j vanishes" for
/// every j with Σ jᵢ/rᵢ < t.
fn condition_rows<S: Scalar>(r: &MultiDegree, charts: &[Chart<S>], t: &Rational, proto: &S) -> Result<Vec<Vec<S>>> {
    let mats: Vec<Vec<Vec<S>>> = charts.iter().enumerate().map(|(i, c)| chart_matrix(c, r.get(i), proto)).collect();
    let ms = monomials(r);
    let js = lattice_points(r, t, Side::Lower, DEFAULT_LATTICE_LIMIT)?;
    Ok(js
        .iter()
        .map(|j| {
            ms.iter()
                .map(|l| {
                    let mut e = proto.one_like();
                    for (i, m) in mats.iter().enumerate() {
                        let x = &m[l[i] as usize][j[i] as usize];
                        if x.vanishes() {
                            return proto.zero_like();
                        }
                        e = e.times(x);
                    }
                    e
                })
                .collect()
        })
        .collect())
}

/// {f : ind_{1/r}(f, z) ≥ t} for charts over the coefficient field.
pub fn kernel_at<S: Scalar>(charts: &[Chart<S>], r: &MultiDegree, t: &Rational, proto: &S) -> Result<SectionSubspace<S>> {
    if charts.len() != r.n() {
        return Err(Error::DegreeMismatch("one point per factor is needed".into()));
    }
    if t < &Rational::zero() {
        return Err(Error::DomainError(format!("t = {t} is negative")));
    }
    let rows = condition_rows(r, charts, t, proto)?;
    SectionSubspace::span(r.clone(), nullspace(&rows, r.box_size() as usize, proto))
}

/// K_r(z, t) at a rational point z.
pub fn kernel_single(z: &[ProjPoint], r: &MultiDegree, t: &Rational) -> Result<SectionSubspace> {
    if r.box_size() > DEFAULT_LATTICE_LIMIT {
        return Err(Error::SizeLimit { count: r.box_size(), limit: DEFAULT_LATTICE_LIMIT });
    }
    let charts = z.iter().map(Chart::of_rational).collect::<Result<Vec<_>>>()?;
    kernel_at(&charts, r, t, &Rational::zero())
}

/// Checks that every aᵢ has an affine coordinate generating its field K′ and
/// returns K′.
fn generating_field(a: &[ProjPoint]) -> Result<NumberField> {
    let k = common_field(a)?.ok_or(Error::NotGenerating)?;
    for p in a {
        match p.affine_coordinate() {
            Some(x) if x.generates() => {}
            _ => return Err(Error::NotGenerating),
        }
    }
    Ok(k)
}

/// K_{q,r}(a, t): rational sections whose index at a (a point over K′ with
/// every coordinate generating K′) is at least t. Each K′-linear condition is
/// split into its q rational coordinates.
pub fn kernel_conjugates(a: &[ProjPoint], r: &MultiDegree, t: &Rational) -> Result<SectionSubspace> {
    if a.len() != r.n() {
        return Err(Error::DegreeMismatch("one point per factor is needed".into()));
    }
    let k = generating_field(a)?;
    let charts = a.iter().map(|p| Chart::of_point(p, &k)).collect::<Result<Vec<_>>>()?;
    let rows = condition_rows(r, &charts, t, &k.zero())?;
    let mut qrows = Vec::with_capacity(rows.len() * k.degree());
    for row in &rows {
        for c in 0..k.degree() {
            qrows.push(row.iter().map(|e| e.coords()[c].clone()).collect::<Vec<_>>());
        }
    }
    let zero = Rational::zero();
    SectionSubspace::span(r.clone(), nullspace(&qrows, r.box_size() as usize, &zero))
}

/// Dimension over K′ of ∩_σ K_r(σ(a), t), σ running over the automorphisms of
/// a Galois field K′. Equals `kernel_conjugates(a, r, t).dim()` by descent.
pub fn kernel_conjugates_galois_dim(a: &[ProjPoint], r: &MultiDegree, t: &Rational) -> Result<usize> {
    let k = generating_field(a)?;
    let auts = automorphisms(&k)?;
    if auts.len() != k.degree() {
        return Err(Error::InvalidInput(format!("{k} is not a Galois extension (or its automorphisms were not found)")));
    }
    let mut rows = Vec::new();
    for tau in &auts {
        let charts = a
            .iter()
            .map(|p| {
                let (x0, x1) = p.coords_in(&k)?;
                let img = ProjPoint::algebraic(apply_automorphism(&x0, tau), apply_automorphism(&x1, tau))?;
                Chart::of_point(&img, &k)
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(condition_rows(r, &charts, t, &k.zero())?);
    }
    Ok(r.box_size() as usize - rank(&rows))
}

/// x(θ) ↦ x(τθ).
pub fn apply_automorphism(x: &FieldElem, tau_theta: &FieldElem) -> FieldElem {
    let k = x.field();
    let mut acc = k.zero();
    for c in x.coords().iter().rev() {
        acc = acc.times(tau_theta).plus(&k.from_rational(c));
    }
    acc
}

/// Order of vanishing at z of a nonzero binary form Σ c_ℓ T₀^{d−ℓ}T₁^ℓ.
pub fn multiplicity<S: Scalar>(coeffs: &[S], chart: &Chart<S>) -> Result<u64> {
    let d = coeffs.len().checked_sub(1).ok_or(Error::ZeroForm)?;
    let f = MultiHomogPoly::from_vector(MultiDegree::new(vec![d.max(1) as u64])?, &{
        let mut v = coeffs.to_vec();
        if d == 0 {
            v.push(coeffs[0].zero_like());
        }
        v
    })?;
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    if d == 0 {
        return Ok(0);
    }
    let local = local_expansion(&f, std::slice::from_ref(chart))?;
    Ok(local.keys().map(|l| l[0]).min().expect("nonzero form"))
}

/// Multiplicity at a point over Q or over the coefficients' field.
pub fn multiplicity_at(coeffs: &[Rational], z: &ProjPoint) -> Result<u64> {
    match z.field() {
        None => multiplicity(coeffs, &Chart::of_rational(z)?),
        Some(k) => {
            let c: Vec<FieldElem> = coeffs.iter().map(|x| k.from_rational(x)).collect();
            multiplicity(&c, &Chart::of_point(z, k)?)
        }
    }
}

/// Equality in P¹ (cross product zero), across representations.
pub fn same_point(x: &ProjPoint, y: &ProjPoint) -> Result<bool> {
    match common_field(&[x.clone(), y.clone()])? {
        None => {
            let (a0, a1) = x.rational_coords().expect("rational");
            let (b0, b1) = y.rational_coords().expect("rational");
            Ok(a0 * b1 == a1 * b0)
        }
        Some(k) => {
            let (a0, a1) = x.coords_in(&k)?;
            let (b0, b1) = y.coords_in(&k)?;
            Ok(a0.times(&b1).minus(&a1.times(&b0)).vanishes())
        }
    }
}

/// Outcome of evaluating both sides of the Dyson inequality
/// Σ_σ vol△ₙ(t^{(σ)}) ≤ 1 + ε_{q,r} for q + 1 points.
#[derive(Clone, Debug, Serialize)]
pub struct DysonReport {
    pub check: &'static str,
    pub q: u64,
    pub indices: Vec<IndexValue>,
    #[serde(with = "crate::exactnum::rational::serde_rational")]
    pub lhs: Rational,
    #[serde(with = "crate::exactnum::rational::serde_rational")]
    pub rhs: Rational,
    #[serde(with = "crate::exactnum::rational::serde_rational")]
    pub slack: Rational,
    pub verdict: Verdict,
    /// A False verdict contradicts a theorem, so it can only mean a bug.
    pub internal_consistency: bool,
}

pub fn dyson_check(f: &MultiHomogPoly<Rational>, points: &[Vec<ProjPoint>], r: &MultiDegree) -> Result<DysonReport> {
    if f.is_zero() {
        return Err(Error::ZeroSection);
    }
    if f.r() != r {
        return Err(Error::DegreeMismatch("section degree differs from r".into()));
    }
    if points.is_empty() {
        return Err(Error::InvalidInput("at least one point is needed".into()));
    }
    let n = r.n();
    for p in points {
        if p.len() != n {
            return Err(Error::DegreeMismatch("one coordinate per factor is needed".into()));
        }
    }
    for i in 0..n {
        for s in 0..points.len() {
            for t in s + 1..points.len() {
                if same_point(&points[s][i], &points[t][i])? {
                    return Err(Error::ProjectionClash { factor: i + 1 });
                }
            }
        }
    }
    let b = Weight::reciprocal(r);
    let top = int(n as i64);
    let mut indices = Vec::with_capacity(points.len());
    let mut lhs = Rational::zero();
    for p in points {
        let ind = index(f, p, &b)?;
        let t = ind.finite().expect("nonzero section has finite index").clone();
        lhs += vol_lower(n, if t > top { &top } else { &t })?;
        indices.push(ind);
    }
    let q = points.len() as u64 - 1;
    // the error term uses max(q − 1, 0), which eps_qr(1, ·) = 0 realizes for q = 0
    let rhs = Rational::one() + eps_qr(q.max(1), r);
    let verdict = Verdict::from_bool(lhs <= rhs);
    Ok(DysonReport {
        check: "dyson-inequality",
        q,
        indices,
        slack: &rhs - &lhs,
        lhs,
        rhs,
        verdict,
        internal_consistency: verdict.is_true(),
    })
}

/// Lexicographic comparison helper used to sort indices in reports.
pub fn compare_index(a: &IndexValue, b: &IndexValue) -> Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::count_points;
    use crate::exactnum::rational::rat;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn md(r: &[u64]) -> MultiDegree {
        MultiDegree::new(r.to_vec()).unwrap()
    }

    fn sqrt2() -> NumberField {
        NumberField::from_i64(&[-2, 0, 1]).unwrap()
    }

    #[test]
    fn index_examples() {
        // at (1:0) on both factors the local monomials are the T₁ powers
        let r = md(&[3, 3]);
        let f = MultiHomogPoly::new(r, [(vec![2, 1], int(1)), (vec![3, 0], int(1))]).unwrap();
        let z = [ProjPoint::ints(1, 0), ProjPoint::ints(1, 0)];
        assert_eq!(index(&f, &z, &Weight::new(vec![int(1), int(1)]).unwrap()).unwrap(), IndexValue::Finite(int(3)));
        assert_eq!(index(&f, &z, &Weight::new(vec![rat(1, 2), int(1)]).unwrap()).unwrap(), IndexValue::Finite(rat(3, 2)));
        let zero = MultiHomogPoly::<Rational>::zero(md(&[3, 3]));
        assert_eq!(index(&zero, &z, &Weight::reciprocal(&md(&[3, 3]))).unwrap(), IndexValue::Infinite);
    }

    #[test]
    fn index_at_shifted_and_infinite_points() {
        // (T₁ − 2T₀)² T₀ vanishes to order 2 at (1:2)
        let r = md(&[3]);
        let f = MultiHomogPoly::from_vector(r.clone(), &[int(4), int(-4), int(1), int(0)]).unwrap();
        let b = Weight::new(vec![int(1)]).unwrap();
        assert_eq!(index(&f, &[ProjPoint::ints(1, 2)], &b).unwrap(), IndexValue::Finite(int(2)));
        // and to order 1 at (0:1), through the factor T₀
        assert_eq!(index(&f, &[ProjPoint::ints(0, 1)], &b).unwrap(), IndexValue::Finite(int(1)));
        // x² − 2 at (1:√2)
        let k = sqrt2();
        let g = MultiHomogPoly::from_vector(md(&[2]), &[int(-2), int(0), int(1)]).unwrap();
        assert_eq!(index(&g, &[ProjPoint::affine(k.theta())], &b).unwrap(), IndexValue::Finite(int(1)));
    }

    #[test]
    fn kernel_single_examples() {
        let r = md(&[2, 2]);
        let z = [ProjPoint::ints(1, 3), ProjPoint::ints(2, -1)];
        assert_eq!(kernel_single(&z, &r, &int(1)).unwrap().dim(), 6);
        assert_eq!(kernel_single(&z, &r, &int(0)).unwrap().dim(), 9);
        assert_eq!(kernel_single(&z, &r, &rat(5, 2)).unwrap().dim(), 0);
        // every basis element has index at least t
        let k = kernel_single(&z, &r, &rat(3, 4)).unwrap();
        for f in k.sections() {
            let ind = index(&f, &z, &Weight::reciprocal(&r)).unwrap();
            assert!(ind >= IndexValue::Finite(rat(3, 4)));
        }
    }

    #[test]
    fn kernel_single_matches_lattice_counts() {
        let z3 = [ProjPoint::ints(1, 1), ProjPoint::ints(0, 1), ProjPoint::ints(3, -2)];
        for r in [vec![1u64, 2, 1], vec![2, 2, 2], vec![3, 1, 2]] {
            let r = md(&r);
            for k in 0..=36 {
                let t = rat(k, 12);
                let dim = kernel_single(&z3, &r, &t).unwrap().dim() as u128;
                assert_eq!(dim, count_points(&r, &t, Side::Upper, DEFAULT_LATTICE_LIMIT).unwrap());
            }
        }
    }

    #[test]
    fn kernel_conjugates_examples() {
        let k = sqrt2();
        let r = md(&[2, 2]);
        let a = [ProjPoint::affine(k.theta()), ProjPoint::affine(k.theta())];
        let ker = kernel_conjugates(&a, &r, &int(1)).unwrap();
        // ≥ 9 − 2·3; sections of (x² − 2)-type divisibility in both factors
        assert!(ker.dim() >= 3);
        assert_eq!(ker.dim(), kernel_conjugates_galois_dim(&a, &r, &int(1)).unwrap());
        assert_eq!(kernel_conjugates(&a, &r, &int(0)).unwrap().dim(), 9);
        let bad = [ProjPoint::ints(1, 2), ProjPoint::affine(k.theta())];
        assert!(matches!(kernel_conjugates(&bad, &r, &int(1)), Err(Error::NotGenerating)));
        let rational_in_k = [ProjPoint::affine(k.from_rational(&int(3))), ProjPoint::affine(k.theta())];
        assert!(matches!(kernel_conjugates(&rational_in_k, &r, &int(1)), Err(Error::NotGenerating)));
    }

    #[test]
    fn kernel_conjugates_galois_stable() {
        let k3 = NumberField::from_i64(&[-3, 0, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let mk = |rng: &mut ChaCha8Rng| {
                let c = k3.elem(vec![int(rng.gen_range(-3..=3)), int(rng.gen_range(1..=2))]).unwrap();
                ProjPoint::affine(c)
            };
            let a = [mk(&mut rng), mk(&mut rng)];
            let r = md(&[rng.gen_range(1..=3), rng.gen_range(1..=3)]);
            let t = rat(rng.gen_range(0..=8), 4);
            let d = kernel_conjugates(&a, &r, &t).unwrap().dim();
            assert_eq!(d, kernel_conjugates_galois_dim(&a, &r, &t).unwrap());
            let lower = r.box_size() as i128 - 2 * count_points(&r, &t, Side::Lower, DEFAULT_LATTICE_LIMIT).unwrap() as i128;
            assert!(d as i128 >= lower);
        }
    }

    #[test]
    fn multiplicity_examples() {
        // T₀T₁² at (1:0)
        assert_eq!(multiplicity_at(&[int(0), int(0), int(1)], &ProjPoint::ints(1, 0)).unwrap(), 2);
        assert_eq!(multiplicity_at(&[int(5)], &ProjPoint::ints(1, 0)).unwrap(), 0);
        // (3T₀ − 2T₁)³ at (2:3)
        let c = [int(27), int(-54), int(36), int(-8)];
        assert_eq!(multiplicity_at(&c, &ProjPoint::ints(2, 3)).unwrap(), 3);
        assert!(matches!(multiplicity_at(&[int(0), int(0)], &ProjPoint::ints(1, 0)), Err(Error::ZeroForm)));
    }

    #[test]
    fn dyson_examples() {
        let r = md(&[2, 2]);
        // T₁₁² T₂₁² has full index 2 at ((1:0),(1:0))
        let f = MultiHomogPoly::monomial(r.clone(), vec![2, 2], int(1)).unwrap();
        let one = vec![vec![ProjPoint::ints(1, 0), ProjPoint::ints(1, 0)]];
        let rep = dyson_check(&f, &one, &r).unwrap();
        assert_eq!(rep.lhs, int(1));
        assert_eq!(rep.rhs, int(1));
        assert!(rep.verdict.is_true());
        let clash = vec![vec![ProjPoint::ints(1, 0), ProjPoint::ints(1, 1)], vec![ProjPoint::ints(1, 2), ProjPoint::ints(1, 1)]];
        assert!(matches!(dyson_check(&f, &clash, &r), Err(Error::ProjectionClash { factor: 2 })));
    }

    #[test]
    fn dyson_fuzz() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let r = md(&[rng.gen_range(1..=4), rng.gen_range(1..=4)]);
            let f = random_section(&r, 0.5, 5, &mut rng);
            if f.is_zero() {
                continue;
            }
            let pts = vec![
                vec![ProjPoint::ints(1, 0), ProjPoint::ints(1, 1)],
                vec![ProjPoint::ints(0, 1), ProjPoint::ints(1, -1)],
            ];
            let rep = dyson_check(&f, &pts, &r).unwrap();
            assert!(rep.verdict.is_true(), "{rep:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn index_is_a_valuation(seed in 0u64..10_000, x in -3i64..=3, y in -3i64..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = md(&[2, 3]);
            let f = random_section(&r, 0.6, 4, &mut rng);
            let g = random_section(&r, 0.6, 4, &mut rng);
            let z = [ProjPoint::ints(1, x), ProjPoint::ints(1, y)];
            let b = Weight::new(vec![rat(1, 2), rat(1, 3)]).unwrap();
            let (fi, gi) = (index(&f, &z, &b).unwrap(), index(&g, &z, &b).unwrap());
            let fg = f.mul(&g).unwrap();
            prop_assert_eq!(index(&fg, &z, &b).unwrap(), fi.clone() + gi.clone());
            let s = index(&f.add(&g).unwrap(), &z, &b).unwrap();
            prop_assert!(s >= fi.min(gi));
        }
    }
}
