//! Exact and ball-rigorous verification of the effective inequalities that
//! drive a GIT-style proof of Roth's theorem: heights and v-adic distances on
//! the projective line, the volume functions of the unit cube, index and
//! kernel computations for multihomogeneous sections, instability
//! coefficients, Wronskians, Pluecker heights and the end-to-end lower bound.

pub mod error;
pub mod exactnum;
pub mod heights;
pub mod combinatorics;
pub mod sections;
pub mod git;
pub mod wronskian;
pub mod arakelov;
pub mod melb;
pub mod cli;

pub use error::{Error, Result};
pub use exactnum::{RealBall, Rational, Verdict};
