//! End-to-end evaluators: the effective lower bound for the proximity of
//! rational points to algebraic ones, the comparison inequality it is
//! deduced from, and the parameter choices linking the two.
//!
//! All heights are over the base field Q, so the normalization 1/[K:Q] is 1.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::combinatorics::{
    big_r, eps_qr, mu_ball, t_qn, u_qr, u_tilde, vol_lower_ball, w_qr, zeta1_integral_upper_ball, MultiDegree,
};
use crate::exactnum::ball::ln_rational;
use crate::exactnum::rational::{ceil_int, factorial, from_bigint, int, rat, Rational};
use crate::exactnum::{embeddings, NumberField, Place, RealBall, Scalar, Verdict};
use crate::git::ss_condition;
use crate::heights::{height, proximity_v, ProjPoint};
use crate::{Error, Result};

/// Couples (xᵢ, aᵢ) with xᵢ ∈ P¹(Q) and aᵢ ∈ P¹(K′), K(aᵢ) = K′, together
/// with the finite set S of places and the multidegree r.
#[derive(Clone, Debug, Serialize)]
pub struct ApproximationInstance {
    #[serde(serialize_with = "ser_field")]
    pub field: NumberField,
    pub places: Vec<Place>,
    pub r: MultiDegree,
    pub couples: Vec<(ProjPoint, ProjPoint)>,
}

fn ser_field<S: serde::Serializer>(k: &NumberField, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(k.minpoly().iter().map(|c| c.to_string()))
}

impl ApproximationInstance {
    /// Checks n ≥ 2, q ≥ 2, xᵢ rational and aᵢ generating K′. Distinctness
    /// of xᵢ and σ(aᵢ) is automatic once aᵢ is irrational.
    pub fn new(
        field: NumberField,
        places: Vec<Place>,
        r: MultiDegree,
        couples: Vec<(ProjPoint, ProjPoint)>,
    ) -> Result<ApproximationInstance> {
        if couples.len() != r.n() {
            return Err(Error::DegreeMismatch(format!("{} couples for {} factors", couples.len(), r.n())));
        }
        if r.n() < 2 {
            return Err(Error::HypothesisFailed("needs n >= 2 factors".into()));
        }
        if field.degree() < 2 {
            return Err(Error::HypothesisFailed("needs an extension of degree q >= 2".into()));
        }
        for (i, (x, a)) in couples.iter().enumerate() {
            if !x.is_rational() {
                return Err(Error::HypothesisFailed(format!("x_{} = {x} is not rational", i + 1)));
            }
            if !generates(a, &field)? {
                return Err(Error::HypothesisFailed(format!("a_{} = {a} does not generate the field", i + 1)));
            }
        }
        let mut places = places;
        places.sort();
        places.dedup();
        Ok(ApproximationInstance { field, places, r, couples })
    }

    pub fn q(&self) -> u64 {
        self.field.degree() as u64
    }

    pub fn n(&self) -> usize {
        self.r.n()
    }
}

fn generates(a: &ProjPoint, field: &NumberField) -> Result<bool> {
    let (a0, a1) = a.coords_in(field)?;
    let ratio = match a0.checked_inv() {
        Some(inv) => a1.times(&inv),
        None => return Ok(false),
    };
    Ok(ratio.generates())
}

/// min_i rᵢ m_v(σ(aᵢ), xᵢ) for one embedding σ.
#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingTerm {
    pub embedding: usize,
    pub proximities: Vec<RealBall>,
    pub weighted_min: RealBall,
}

/// Contribution of one place: the min (or max) over embeddings.
#[derive(Clone, Debug, Serialize)]
pub struct PlaceTerm {
    pub place: Place,
    pub embeddings: Vec<EmbeddingTerm>,
    /// Index of the embedding attaining the extremum (smallest lower end for
    /// a min, largest upper end for a max).
    pub attained_by: usize,
    pub value: RealBall,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Extremum {
    Min,
    Max,
}

fn place_terms(inst: &ApproximationInstance, ext: Extremum, prec: u32) -> Result<Vec<PlaceTerm>> {
    let mut out = Vec::with_capacity(inst.places.len());
    for v in &inst.places {
        let embs = embeddings(&inst.field, v, prec)?.embeddings;
        let mut terms = Vec::with_capacity(embs.len());
        for sigma in &embs {
            let mut proximities = Vec::with_capacity(inst.n());
            let mut weighted: Option<RealBall> = None;
            for (i, (x, a)) in inst.couples.iter().enumerate() {
                let xl = x.localize(None, v, prec)?;
                let al = a.localize(Some(sigma), v, prec)?;
                let m = proximity_v(&al, &xl, v, prec)?;
                let rm = m.mul_q(&int(inst.r.get(i) as i64));
                weighted = Some(match weighted {
                    None => rm,
                    Some(w) => w.min(&rm),
                });
                proximities.push(m);
            }
            terms.push(EmbeddingTerm { embedding: sigma.index(), proximities, weighted_min: weighted.expect("n >= 2") });
        }
        let pick = match ext {
            Extremum::Min => (0..terms.len()).min_by(|&i, &j| terms[i].weighted_min.lo().cmp(&terms[j].weighted_min.lo())),
            Extremum::Max => (0..terms.len()).max_by(|&i, &j| terms[i].weighted_min.hi().cmp(&terms[j].weighted_min.hi())),
        }
        .ok_or_else(|| Error::InternalMismatch(format!("no embeddings at {v}")))?;
        let value = terms.iter().skip(1).fold(terms[0].weighted_min.clone(), |acc, t| match ext {
            Extremum::Min => acc.min(&t.weighted_min),
            Extremum::Max => acc.max(&t.weighted_min),
        });
        out.push(PlaceTerm { place: v.clone(), attained_by: terms[pick].embedding, embeddings: terms, value });
    }
    Ok(out)
}

/// Σ rᵢ h(xᵢ) and Σ rᵢ h(aᵢ), with the individual heights.
fn weighted_heights(inst: &ApproximationInstance, prec: u32) -> Result<(Vec<RealBall>, Vec<RealBall>, RealBall, RealBall)> {
    let mut hx = Vec::with_capacity(inst.n());
    let mut ha = Vec::with_capacity(inst.n());
    let (mut sx, mut sa) = (RealBall::zero(prec), RealBall::zero(prec));
    for (i, (x, a)) in inst.couples.iter().enumerate() {
        let ri = int(inst.r.get(i) as i64);
        let (x, a) = (height(x, prec)?, height(a, prec)?);
        sx = sx.add(&x.mul_q(&ri));
        sa = sa.add(&a.mul_q(&ri));
        hx.push(x);
        ha.push(a);
    }
    Ok((hx, ha, sx, sa))
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedConstant {
    pub name: &'static str,
    pub value: RealBall,
}

/// Both sides of one of the two end-to-end inequalities LHS ≤ RHS.
#[derive(Clone, Debug, Serialize)]
pub struct SideReport {
    pub check: &'static str,
    pub q: u64,
    pub r: MultiDegree,
    /// Set when S contains the archimedean place although the lower bound is
    /// stated for finite places only; the evaluation proceeds regardless.
    pub archimedean_in_s: bool,
    pub places: Vec<PlaceTerm>,
    pub heights_x: Vec<RealBall>,
    pub heights_a: Vec<RealBall>,
    pub weighted_height_x: RealBall,
    pub weighted_height_a: RealBall,
    /// Factor in front of the sum over places.
    pub lhs_factor: RealBall,
    pub constants: Vec<NamedConstant>,
    pub lhs: RealBall,
    pub rhs: RealBall,
    pub slack: RealBall,
    pub verdict: Verdict,
}

impl SideReport {
    pub fn constant(&self, name: &str) -> Option<&RealBall> {
        self.constants.iter().find(|c| c.name == name).map(|c| &c.value)
    }
}

fn sum_places(terms: &[PlaceTerm], prec: u32) -> RealBall {
    terms.iter().fold(RealBall::zero(prec), |acc, t| acc.add(&t.value))
}

/// Checks 0 < δ < 1/(2·n!).
fn check_delta(n: usize, delta: &Rational) -> Result<()> {
    let cap = Rational::new(1.into(), factorial(n as u64) * 2);
    if !delta.is_positive() || delta >= &cap {
        return Err(Error::HypothesisFailed(format!("delta = {delta} outside (0, {cap})")));
    }
    Ok(())
}

/// Coefficients of the lower bound's right-hand side:
/// (1 + 2q ⁿ√δ, q/δ, log √(2q)/δ + log 8).
pub fn melb_coefficients(q: u64, n: usize, delta: &Rational, prec: u32) -> Result<(RealBall, Rational, RealBall)> {
    let d = RealBall::exact(delta.clone(), prec);
    let cx = d.nth_root(n as u32)?.mul_q(&int(2 * q as i64)).add_q(&Rational::one());
    let ca = int(q as i64) / delta;
    let cr = ln_rational(&int(2 * q as i64), prec)
        .mul_q(&(Rational::one() / (delta * int(2))))
        .add(&ln_rational(&int(8), prec));
    Ok((cx, ca, cr))
}

/// t_{q,n}(δ) Σ_{v∈S} min_σ min_i rᵢ m_v(σ(aᵢ), xᵢ)
///   ≤ (1 + 2q ⁿ√δ) Σ rᵢ h(xᵢ) + (q/δ) Σ rᵢ h(aᵢ) + (log √(2q)/δ + log 8)|r|,
/// under 0 < δ < 1/(2·n!) and rᵢ/rᵢ₊₁ > R_{q,n}(δ).
pub fn melb_sides(inst: &ApproximationInstance, delta: &Rational, prec: u32) -> Result<SideReport> {
    let (q, n) = (inst.q(), inst.n());
    check_delta(n, delta)?;
    let wp = prec + 32;
    let big = big_r(q, n, delta, wp)?;
    for i in 0..n - 1 {
        let ratio = RealBall::exact(rat(inst.r.get(i) as i64, inst.r.get(i + 1) as i64), wp);
        if !ratio.gt(&big).is_true() {
            return Err(Error::HypothesisFailed(format!(
                "r_{}/r_{} = {} is not above R = {}",
                i + 1,
                i + 2,
                ratio,
                big
            )));
        }
    }
    let t = t_qn(q, n, delta, wp)?;
    let places = place_terms(inst, Extremum::Min, wp)?;
    let (heights_x, heights_a, sx, sa) = weighted_heights(inst, wp)?;
    let (cx, ca, cr) = melb_coefficients(q, n, delta, wp)?;
    let lhs = t.mul(&sum_places(&places, wp));
    let rhs = cx.mul(&sx).add(&sa.mul_q(&ca)).add(&cr.mul_q(&int(inst.r.total() as i64)));
    let slack = rhs.sub(&lhs);
    let verdict = lhs.le(&rhs);
    let round = |b: RealBall| b.with_prec(prec);
    Ok(SideReport {
        check: "effective-lower-bound",
        q,
        r: inst.r.clone(),
        archimedean_in_s: inst.places.iter().any(Place::is_archimedean),
        places,
        heights_x,
        heights_a,
        weighted_height_x: round(sx),
        weighted_height_a: round(sa),
        lhs_factor: round(t),
        constants: vec![
            NamedConstant { name: "x_height_coefficient", value: round(cx) },
            NamedConstant { name: "a_height_coefficient", value: RealBall::exact(ca, prec) },
            NamedConstant { name: "degree_coefficient", value: round(cr) },
        ],
        lhs: round(lhs),
        rhs: round(rhs),
        slack: round(slack),
        verdict,
    })
}

/// The constants of the comparison inequality at (t_a, t_x):
/// C1 = ∫_{▽ₙ(t_x)} ζ₁ + q(vol△ₙ(u) − μₙ(t_x))/2,
/// C2 = q vol△ₙ(t_a) + q(vol△ₙ(u) − μₙ(t_x))/2,
/// C3 = vol△ₙ(u) log √6 + vol▽ₙ(t_x) log √8 + q vol△ₙ(t_a) log √(2q),
/// with u = u_{q,r}(t_a).
pub fn main_theorem_constants(q: u64, r: &MultiDegree, t_a: &RealBall, t_x: &RealBall, prec: u32) -> Result<[RealBall; 3]> {
    let n = r.n();
    let u = u_qr(q, r, t_a, prec)?;
    let vol_u = vol_lower_ball(n, &u)?;
    let vol_a = vol_lower_ball(n, t_a)?;
    let mu_x = mu_ball(n, t_x)?;
    let vol_up_x = vol_lower_ball(n, t_x)?.neg().add_q(&Rational::one());
    let qq = int(q as i64);
    let half_gap = vol_u.sub(&mu_x).mul_q(&(qq.clone() / int(2)));
    let c1 = zeta1_integral_upper_ball(n, t_x)?.add(&half_gap);
    let c2 = vol_a.mul_q(&qq).add(&half_gap);
    let half = rat(1, 2);
    let c3 = vol_u
        .mul(&ln_rational(&int(6), prec).mul_q(&half))
        .add(&vol_up_x.mul(&ln_rational(&int(8), prec).mul_q(&half)))
        .add(&vol_a.mul_q(&qq).mul(&ln_rational(&int(2 * q as i64), prec).mul_q(&half)));
    Ok([c1, c2, c3])
}

/// (1 − q vol△ₙ(t_a)) t_a Σ_{v∈S} max_σ min_i rᵢ m_v(σ(aᵢ), xᵢ)
///   ≤ C1 Σ rᵢ h(xᵢ) + q C2 Σ rᵢ h(aᵢ) + C3 |r|,
/// under μₙ(u_{q,r}(t_a)) > μₙ(t_x) + ε_{q,r}.
pub fn main_theorem_sides(inst: &ApproximationInstance, t_a: &RealBall, t_x: &RealBall, prec: u32) -> Result<SideReport> {
    let (q, n) = (inst.q(), inst.n());
    let wp = prec + 32;
    let ss = ss_condition(q, &inst.r, t_a, t_x, wp)?;
    if !ss.is_true() {
        return Err(Error::SSViolated(format!(
            "mu(u(t_a)) > mu(t_x) + eps is {ss} at t_a = {t_a}, t_x = {t_x}"
        )));
    }
    let factor = vol_lower_ball(n, t_a)?.mul_q(&-int(q as i64)).add_q(&Rational::one()).mul(t_a);
    let places = place_terms(inst, Extremum::Max, wp)?;
    let (heights_x, heights_a, sx, sa) = weighted_heights(inst, wp)?;
    let [c1, c2, c3] = main_theorem_constants(q, &inst.r, t_a, t_x, wp)?;
    let lhs = factor.mul(&sum_places(&places, wp));
    let rhs = c1
        .mul(&sx)
        .add(&c2.mul_q(&int(q as i64)).mul(&sa))
        .add(&c3.mul_q(&int(inst.r.total() as i64)));
    let slack = rhs.sub(&lhs);
    let verdict = lhs.le(&rhs);
    let round = |b: RealBall| b.with_prec(prec);
    Ok(SideReport {
        check: "comparison-inequality",
        q,
        r: inst.r.clone(),
        archimedean_in_s: inst.places.iter().any(Place::is_archimedean),
        places,
        heights_x,
        heights_a,
        weighted_height_x: round(sx),
        weighted_height_a: round(sa),
        lhs_factor: round(factor),
        constants: vec![
            NamedConstant { name: "c1_x_heights", value: round(c1) },
            NamedConstant { name: "c2_a_heights", value: round(c2) },
            NamedConstant { name: "c3_total_degree", value: round(c3) },
        ],
        lhs: round(lhs),
        rhs: round(rhs),
        slack: round(slack),
        verdict,
    })
}

/// One inequality of the parameter estimates, lhs ≤ rhs (or lhs < rhs).
#[derive(Clone, Debug, Serialize)]
pub struct ParamCheck {
    pub name: &'static str,
    pub lhs: RealBall,
    pub rhs: RealBall,
    pub strict: bool,
    pub verdict: Verdict,
}

impl ParamCheck {
    fn le(name: &'static str, lhs: RealBall, rhs: RealBall) -> ParamCheck {
        let verdict = lhs.le(&rhs);
        ParamCheck { name, lhs, rhs, strict: false, verdict }
    }

    fn lt(name: &'static str, lhs: RealBall, rhs: RealBall) -> ParamCheck {
        let verdict = lhs.lt(&rhs);
        ParamCheck { name, lhs, rhs, strict: true, verdict }
    }
}

/// t_a = t_{q,n}(δ), ũ = u_{q,r}(t_a) and w ∈ [n/2, n) with
/// μₙ(ũ) = μₙ(w) + ε_{q,r}, plus the inequalities they are known to satisfy.
#[derive(Clone, Debug, Serialize)]
pub struct ParamReport {
    pub check: &'static str,
    pub q: u64,
    pub n: usize,
    #[serde(with = "crate::exactnum::rational::serde_rational")]
    pub delta: Rational,
    #[serde(with = "crate::exactnum::rational::serde_rational")]
    pub eps: Rational,
    pub t_a: RealBall,
    pub u_tilde: RealBall,
    pub w: RealBall,
    /// A rational t_x ∈ (w, n), above w by at most 2·10⁻⁶, at which the
    /// semi-stability condition holds strictly.
    #[serde(with = "crate::exactnum::rational::serde_rational")]
    pub t_x: Rational,
    pub checks: Vec<ParamCheck>,
    pub verdict: Verdict,
}

pub fn param_pipeline(q: u64, n: usize, delta: &Rational, r: &MultiDegree, prec: u32) -> Result<ParamReport> {
    if r.n() != n {
        return Err(Error::DegreeMismatch(format!("multidegree {:?} for n = {n}", r.degrees())));
    }
    check_delta(n, delta)?;
    let wp = prec + 32;
    let eps = eps_qr(q, r);
    let d = RealBall::exact(delta.clone(), wp);
    let root_delta = d.nth_root(n as u32)?;
    let eps_ball = RealBall::exact(eps.clone(), wp);
    if !eps_ball.lt(&d.mul(&root_delta)).is_true() {
        return Err(Error::HypothesisFailed(format!("eps = {eps} is not below delta^(1 + 1/n)")));
    }
    let nf = from_bigint(factorial(n as u64));
    let de = delta + &eps;
    if de > Rational::one() / &nf {
        return Err(Error::HypothesisFailed(format!("delta + eps = {de} exceeds 1/n!")));
    }
    let t_a = t_qn(q, n, delta, wp)?;
    let u_t = u_tilde(q, r, delta, wp)?;
    let u_via_t_a = u_qr(q, r, &t_a, wp)?;
    if !u_t.sub(&u_via_t_a).contains_zero() {
        return Err(Error::InternalMismatch(format!("u~ = {u_t} but u(t_a) = {u_via_t_a}")));
    }
    let w = w_qr(q, r, delta, wp)?;

    let de_ball = RealBall::exact(de.clone(), wp);
    let vol_u = vol_lower_ball(n, &u_t)?;
    let mu_u = mu_ball(n, &u_t)?;
    let mu_w = mu_ball(n, &w)?;
    let vol_up_w = vol_lower_ball(n, &w)?.neg().add_q(&Rational::one());
    let zeta_lower_u = vol_u.sub(&mu_u).mul_q(&rat(1, 2));
    let zeta_upper_w = zeta1_integral_upper_ball(n, &w)?;
    let de_pow = de_ball.mul(&de_ball.nth_root(n as u32)?);
    let mu_small = {
        let s = d.mul_q(&nf).nth_root(n as u32)?;
        mu_ball(n, &s)?
    };
    let one = RealBall::one(wp);
    let mut checks = vec![
        ParamCheck::lt("delta-below-half-inverse-factorial", d.clone(), RealBall::exact(Rational::one() / (nf.clone() * int(2)), wp)),
        ParamCheck::lt("eps-below-delta-power", eps_ball.clone(), d.mul(&root_delta)),
        ParamCheck::le("volume-at-u-tilde-below-inverse-factorial", vol_u.clone(), RealBall::exact(Rational::one() / &nf, wp)),
        ParamCheck::le("u-tilde-at-most-one", u_t.clone(), one),
        ParamCheck::le("zeta-integral-below-u-tilde", zeta_lower_u, de_pow.mul_q(&rat(1, 2))),
        ParamCheck::lt("mu-at-u-tilde-above-eps", eps_ball.clone(), mu_u.clone()),
    ];
    // with ε = 0 the two sides are the same closed form, so equality holds
    if eps.is_zero() {
        let v = mu_u.clone();
        checks.push(ParamCheck { name: "mu-at-u-tilde-upper-estimate", lhs: v.clone(), rhs: v, strict: false, verdict: Verdict::True });
    } else {
        checks.push(ParamCheck::le("mu-at-u-tilde-upper-estimate", mu_u.clone(), mu_small.add(&eps_ball)));
    }
    checks.push(ParamCheck::le("upper-volume-at-w-below-delta", vol_up_w, d.clone()));
    checks.push(ParamCheck::le("upper-zeta-integral-at-w-below-delta", zeta_upper_w, d.clone()));
    checks.push(ParamCheck::le("volume-gap-below-three-delta-power", vol_u.sub(&mu_w), d.mul(&root_delta).mul_q(&int(3))));
    // the identity vol△ₙ(ũ) = δ + ε, as an enclosure
    checks.push(ParamCheck {
        name: "volume-at-u-tilde-equals-delta-plus-eps",
        lhs: vol_u.clone(),
        rhs: de_ball.clone(),
        strict: false,
        verdict: Verdict::from_bool(vol_u.contains(&de)),
    });

    let t_x = t_x_above(&w, n)?;
    let t_x_ball = RealBall::exact(t_x.clone(), wp);
    let ss = ss_condition(q, r, &t_a, &t_x_ball, wp)?;
    checks.push(ParamCheck {
        name: "semi-stability-at-chosen-t-x",
        lhs: mu_ball(n, &t_x_ball)?.add_q(&eps),
        rhs: mu_ball(n, &u_via_t_a)?,
        strict: true,
        verdict: ss,
    });
    let verdict = Verdict::all(checks.iter().map(|c| c.verdict));
    let round = |b: RealBall| b.with_prec(prec);
    for c in &mut checks {
        c.lhs = c.lhs.clone().with_prec(prec);
        c.rhs = c.rhs.clone().with_prec(prec);
    }
    Ok(ParamReport {
        check: "parameter-pipeline",
        q,
        n,
        delta: delta.clone(),
        eps,
        t_a: round(t_a),
        u_tilde: round(u_t),
        w: round(w),
        t_x,
        checks,
        verdict,
    })
}

/// ⌈w·10⁶⌉/10⁶ + 10⁻⁶ computed from the upper end of the ball.
fn t_x_above(w: &RealBall, n: usize) -> Result<Rational> {
    let scale = int(1_000_000);
    let t = from_bigint(ceil_int(&(w.hi() * &scale))) / &scale + Rational::one() / &scale;
    if t >= int(n as i64) {
        return Err(Error::HypothesisFailed(format!("no rational t_x in (w, n) near w = {w}")));
    }
    Ok(t)
}

/// The lower bound deduced from the comparison inequality: runs the
/// parameter pipeline, evaluates the comparison inequality at (t_a, t_x),
/// and compares its right-hand side (divided by δ) with the lower bound's.
#[derive(Clone, Debug, Serialize)]
pub struct DeductionReport {
    pub check: &'static str,
    pub params: ParamReport,
    pub lower_bound: SideReport,
    pub comparison: SideReport,
    /// Right-hand side of the comparison inequality divided by δ.
    pub comparison_rhs_over_delta: RealBall,
    /// δ(1 + (3/2)q ⁿ√δ) Σ rᵢh(xᵢ) + q Σ rᵢh(aᵢ) + |r| C(δ), divided by δ, with
    /// C(δ) = δ(1 + ⁿ√δ) log √6 + δ log √8 + (1 − δ) log √(2q).
    pub simplified_rhs_over_delta: RealBall,
    /// Lower-bound coefficients dominate the simplified ones term by term.
    pub lower_bound_dominates_simplified: Verdict,
    /// Comparison RHS/δ ≤ lower-bound RHS on this instance.
    pub lower_bound_dominates_comparison: Verdict,
    /// Comparison constants against the simplified ones, term by term:
    /// C1/δ vs 1 + (3/2)q ⁿ√δ, q C2/δ vs q/δ, C3/δ vs C(δ)/δ.
    pub simplified_coefficient_verdicts: [Verdict; 3],
    pub verdict: Verdict,
}

pub fn melb_via_main_theorem(inst: &ApproximationInstance, delta: &Rational, prec: u32) -> Result<DeductionReport> {
    let (q, n) = (inst.q(), inst.n());
    let wp = prec + 32;
    let params = param_pipeline(q, n, delta, &inst.r, wp)?;
    let lower_bound = melb_sides(inst, delta, wp)?;
    let t_x = RealBall::exact(params.t_x.clone(), wp);
    let comparison = main_theorem_sides(inst, &params.t_a, &t_x, wp)?;

    let d = RealBall::exact(delta.clone(), wp);
    let inv_d = Rational::one() / delta;
    let root = d.nth_root(n as u32)?;
    let qq = int(q as i64);
    let half = rat(1, 2);
    let (l6, l8, l2q) = (
        ln_rational(&int(6), wp).mul_q(&half),
        ln_rational(&int(8), wp).mul_q(&half),
        ln_rational(&int(2 * q as i64), wp).mul_q(&half),
    );
    let simp_x = root.mul_q(&(qq.clone() * rat(3, 2))).add_q(&Rational::one());
    let simp_a = RealBall::exact(&qq / delta, wp);
    let c_delta = d
        .mul(&root.add_q(&Rational::one()))
        .mul(&l6)
        .add(&d.mul(&l8))
        .add(&d.neg().add_q(&Rational::one()).mul(&l2q));
    let simp_r = c_delta.mul_q(&inv_d);
    let total = int(inst.r.total() as i64);
    let (sx, sa) = (&lower_bound.weighted_height_x, &lower_bound.weighted_height_a);
    let simplified = simp_x.mul(sx).add(&simp_a.mul(sa)).add(&simp_r.mul_q(&total));

    let (cx, ca, cr) = melb_coefficients(q, n, delta, wp)?;
    let ca = RealBall::exact(ca, wp);
    let dominates = Verdict::all([simp_x.le(&cx), simp_a.le(&ca), simp_r.le(&cr)]);

    let cst = |name| comparison.constant(name).cloned().ok_or_else(|| Error::InternalMismatch(format!("missing {name}")));
    let (c1, c2, c3) = (cst("c1_x_heights")?, cst("c2_a_heights")?, cst("c3_total_degree")?);
    let comp_over = comparison.rhs.mul_q(&inv_d);
    let versus = [
        c1.mul_q(&inv_d).le(&simp_x),
        c2.mul_q(&(&qq * &inv_d)).le(&simp_a),
        c3.mul_q(&inv_d).le(&simp_r),
    ];
    let lb_vs_comp = comp_over.le(&lower_bound.rhs);
    let verdict = Verdict::all([params.verdict, lower_bound.verdict, comparison.verdict, dominates, lb_vs_comp]);
    let round = |b: RealBall| b.with_prec(prec);
    Ok(DeductionReport {
        check: "lower-bound-from-comparison",
        params,
        lower_bound,
        comparison,
        comparison_rhs_over_delta: round(comp_over),
        simplified_rhs_over_delta: round(simplified),
        lower_bound_dominates_simplified: dominates,
        lower_bound_dominates_comparison: lb_vs_comp,
        simplified_coefficient_verdicts: versus,
        verdict,
    })
}

#[cfg(test)]
mod tests;
