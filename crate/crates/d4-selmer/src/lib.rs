//! Exact computations for the graded `D4` pair `(G, V)`: invariant theory and
//! sections, orbit reduction, doubly-marked cubic curves over `F_q(t)`,
//! Harder–Narasimhan slope combinatorics and squarefree discriminant
//! densities.
//!
//! All arithmetic is exact over finite fields; randomized checks draw from
//! counter-based streams (see [`rng`]) so results are reproducible.

use thiserror::Error;

pub mod core_algebra;
pub mod curves_arithmetic;
pub mod densities;
pub mod hn_weights;
pub mod invariants_sections;
pub mod lie_d4;
pub mod orbits;
pub mod rng;
pub mod suites;

/// Errors raised by the arithmetic and algebra layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("characteristic {0} is not a prime >= 5")]
    InvalidCharacteristic(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("field of order {0} exceeds the table limit")]
    FieldTooLarge(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("the zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("truncation level must be at least 1")]
    InvalidLevel,
    #[error("element has a pole of order {} at this place", -ord)]
    Pole { ord: i64 },
    #[error("not a monic irreducible polynomial")]
    NotAPlace,
    #[error("operation requires characteristic at least {required}, got {got}")]
    CharacteristicTooSmall { required: u64, got: u64 },
    #[error("{0}")]
    Precondition(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}
