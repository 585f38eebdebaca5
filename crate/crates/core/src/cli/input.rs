//! TOML instance schemas. Rationals are "p/q" strings or bare integers;
//! points are `["x0", "x1"]` over Q or `[[x0 coords], [x1 coords]]` over the
//! field given by `field` (minimal polynomial, constant term first).

use num_bigint::BigInt;
use serde::Deserialize;

use crate::combinatorics::MultiDegree;
use crate::exactnum::rational::parse_rational;
use crate::exactnum::{NumberField, Place, Rational};
use crate::git::OneParamSubgroup;
use crate::heights::ProjPoint;
use crate::melb::ApproximationInstance;
use crate::sections::MultiHomogPoly;
use crate::{Error, Result};

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RatValue {
    Int(i64),
    Str(String),
}

impl RatValue {
    pub fn value(&self) -> Result<Rational> {
        match self {
            RatValue::Int(n) => Ok(Rational::from_integer(BigInt::from(*n))),
            RatValue::Str(s) => parse_rational(s),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Rational([RatValue; 2]),
    Algebraic([Vec<RatValue>; 2]),
}

impl PointSpec {
    pub fn to_point(&self, field: Option<&NumberField>) -> Result<ProjPoint> {
        match self {
            PointSpec::Rational([a, b]) => ProjPoint::rational(&a.value()?, &b.value()?),
            PointSpec::Algebraic([a, b]) => {
                let k = field.ok_or_else(|| Error::InvalidInput("algebraic point given without `field`".into()))?;
                let x0 = k.elem(rationals(a)?)?;
                let x1 = k.elem(rationals(b)?)?;
                ProjPoint::algebraic(x0, x1)
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PlaceSpec {
    Prime(u64),
    Name(String),
}

pub fn parse_place(p: &PlaceSpec) -> Result<Place> {
    match p {
        PlaceSpec::Prime(n) => Place::finite(*n),
        PlaceSpec::Name(s) => Place::parse(s),
    }
}

/// One monomial: exponents ℓ (of the second variable in each factor) and a coefficient.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub l: Vec<u64>,
    pub c: RatValue,
}

pub fn rationals(v: &[RatValue]) -> Result<Vec<Rational>> {
    v.iter().map(RatValue::value).collect()
}

pub fn points(v: &[PointSpec], field: Option<&NumberField>) -> Result<Vec<ProjPoint>> {
    v.iter().map(|p| p.to_point(field)).collect()
}

pub fn section(r: &MultiDegree, terms: &[TermSpec]) -> Result<MultiHomogPoly<Rational>> {
    let terms = terms.iter().map(|t| Ok((t.l.clone(), t.c.value()?))).collect::<Result<Vec<_>>>()?;
    MultiHomogPoly::new(r.clone(), terms)
}

fn field_of(f: &Option<Vec<i64>>) -> Result<Option<NumberField>> {
    f.as_deref().map(NumberField::from_i64).transpose()
}

macro_rules! with_field {
    ($($t:ty),*) => {$(
        impl $t {
            pub fn field(&self) -> Result<Option<NumberField>> {
                field_of(&self.field)
            }
        }
    )*};
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeightInput {
    pub field: Option<Vec<i64>>,
    pub point: PointSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceInput {
    pub field: Option<Vec<i64>>,
    pub place: PlaceSpec,
    pub x: PointSpec,
    pub y: PointSpec,
    /// Which embedding of the field at `place`; 0 when absent.
    pub embedding: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombiInput {
    pub n: usize,
    pub t: RatValue,
    pub q: Option<u64>,
    pub delta: Option<RatValue>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexInput {
    pub field: Option<Vec<i64>>,
    pub r: Vec<u64>,
    pub terms: Vec<TermSpec>,
    pub points: Vec<PointSpec>,
    /// Defaults to b = (1/r₁, …, 1/rₙ).
    pub weight: Option<Vec<RatValue>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelInput {
    pub field: Option<Vec<i64>>,
    pub r: Vec<u64>,
    pub t: RatValue,
    pub points: Vec<PointSpec>,
    /// Vanish at every conjugate of the points rather than at the points.
    #[serde(default)]
    pub conjugates: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstabInput {
    pub r: Vec<u64>,
    pub t: RatValue,
    pub points: Vec<PointSpec>,
    pub subgroup: OneParamSubgroup,
}

impl InstabInput {
    pub fn subgroup(&self) -> Result<OneParamSubgroup> {
        if self.subgroup.n() != self.r.len() {
            return Err(Error::DegreeMismatch("subgroup and r have different lengths".into()));
        }
        Ok(self.subgroup.clone())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsInput {
    pub q: u64,
    pub r: Vec<u64>,
    pub t_a: Option<RatValue>,
    /// Sets t_a = t_{q,n}(δ) when t_a is absent.
    pub delta: Option<RatValue>,
    pub t_x: RatValue,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dyson2Input {
    pub field: Option<Vec<i64>>,
    pub r: Vec<u64>,
    pub terms: Vec<TermSpec>,
    pub targets: Vec<Vec<PointSpec>>,
    pub y: Vec<PointSpec>,
    pub weight: Vec<RatValue>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DysonInput {
    pub field: Option<Vec<i64>>,
    pub r: Vec<u64>,
    pub terms: Vec<TermSpec>,
    pub points: Vec<Vec<PointSpec>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceInput {
    pub field: Vec<i64>,
    pub places: Vec<PlaceSpec>,
    pub r: Vec<u64>,
    pub x: Vec<PointSpec>,
    pub a: Vec<PointSpec>,
    pub delta: Option<RatValue>,
    pub t_a: Option<RatValue>,
    pub t_x: Option<RatValue>,
}

impl InstanceInput {
    pub fn instance(&self) -> Result<ApproximationInstance> {
        if self.x.len() != self.a.len() {
            return Err(Error::InvalidInput(format!("{} points x but {} points a", self.x.len(), self.a.len())));
        }
        let k = NumberField::from_i64(&self.field)?;
        let places = self.places.iter().map(parse_place).collect::<Result<Vec<_>>>()?;
        let couples = self
            .x
            .iter()
            .zip(&self.a)
            .map(|(x, a)| Ok((x.to_point(None)?, a.to_point(Some(&k))?)))
            .collect::<Result<Vec<_>>>()?;
        ApproximationInstance::new(k, places, MultiDegree::new(self.r.clone())?, couples)
    }
}

with_field!(HeightInput, DistanceInput, IndexInput, KernelInput, Dyson2Input, DysonInput);
