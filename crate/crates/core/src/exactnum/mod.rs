//! Scalars: rationals, places of Q, real/complex/p-adic balls, number fields
//! and their embeddings, and exact linear algebra.

pub mod ball;
pub mod complex;
pub mod embed;
pub mod field;
pub mod linalg;
pub mod padic;
pub mod place;
pub mod poly;
pub mod primes;
pub mod rational;
pub mod verdict;

pub use ball::RealBall;
pub use complex::ComplexBall;
pub use embed::{embeddings, eval_embedded, Embedding, LocalEmbeddings, LocalValue};
pub use field::{FieldElem, NumberField};
pub use padic::PadicBall;
pub use place::{abs_value, Place};
pub use rational::Rational;
pub use verdict::Verdict;

/// Field operations shared by `Rational` and `FieldElem`, so that index and
/// kernel code runs unchanged over Q and over a number field.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_rational_like(&self, q: &Rational) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn checked_inv(&self) -> Option<Self>;
    fn vanishes(&self) -> bool;
}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        num_traits::Zero::zero()
    }
    fn one_like(&self) -> Self {
        num_traits::One::one()
    }
    fn from_rational_like(&self, q: &Rational) -> Self {
        q.clone()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn checked_inv(&self) -> Option<Self> {
        if num_traits::Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn vanishes(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}
