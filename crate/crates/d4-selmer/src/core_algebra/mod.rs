//! Exact arithmetic: finite fields, polynomials, dense linear algebra, the
//! rational function field `F_q(t)` and quartic discriminants.

pub mod disc;
pub mod field;
pub mod funcfield;
pub mod linalg;
pub mod poly;

pub use disc::{quartic_disc, InvTuple};
pub use field::{DualRing, Field, Gf, Ring};
pub use funcfield::{local_data, LocalTrunc, Place, PolyRing, RatFunc};
pub use linalg::Mat;
pub use poly::Poly;
