//! Exact certification of Waring expressions of quartic forms in five
//! variables: given T = l1*L1^4 + .. + lr*Lr^4 with r <= 13, decide whether
//! r is the rank of T and whether the expression is the unique one of that
//! length, with a full exact evidence trail; construct non-identifiable
//! witness instances by liaison; and recover alternative decompositions
//! numerically.

pub mod arith;
pub mod certifier;
pub mod constructor;
pub mod criteria;
pub mod liaison;
pub mod linalg;
pub mod pointsets;
pub mod poly;

pub use arith::{Complex64, GfElem, GfPrime, Integer, Rational};
pub use linalg::{Matrix, Subspace};
pub use poly::{GradedForm, ProjectivePoint, QuarticForm};
