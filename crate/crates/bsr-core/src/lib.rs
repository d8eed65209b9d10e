//! Bott-Samelson rings of words in arbitrary Coxeter systems: the
//! quadratic presentation, an independent tensor-model multiplication
//! oracle, Groebner/Koszul certification, and the Kaehler package
//! (Poincare duality, hard Lefschetz, Hodge-Riemann) with an automated
//! ample-vector search.

pub mod bsring;
pub mod coxeter;
pub mod demazure;
pub mod groebner;
pub mod hodge;
pub mod numeric;
pub mod tensor;

pub use bsring::{build_presentation, invariance_check, Presentation, RingElement};
pub use coxeter::{CoxeterMatrix, CoxeterWord, Order};
pub use hodge::{find_ample, verify_all, LefschetzVector, Verdict};
pub use numeric::{Backend, Scalar, Signature};
