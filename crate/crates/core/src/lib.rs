//! Exact-arithmetic analysis of polynomial ODE systems in two and three
//! state variables: projective and weighted compactification charts,
//! accessible boundary singularities with local indices, dominant-balance
//! pole tests, explicit blow-up resolution with parameter-condition
//! extraction, first-integral and birational-atlas verification, and
//! fixed-step complex numerical cross-checks.
//!
//! Everything symbolic runs over the Gaussian rationals Q(i); floating
//! point appears only in the `numeric` module and in flagged fallbacks.

pub mod charts;
pub mod error;
pub mod field;
pub mod gauss;
pub mod linalg;
pub mod numeric;
pub mod painleve;
pub mod pipeline;
pub mod poly;
pub mod ratexpr;
pub mod report;
pub mod resolve;
pub mod sample;
pub mod singular;
pub mod solve;
pub mod suite;
pub mod sysdef;
pub mod systems;
pub mod verify;

pub use error::{AlgebraError, FieldError, SingularError};
pub use field::{ExpSymbol, RationalMap, VField};
pub use gauss::{parse_gaussian, GaussianRational, Gq};
pub use poly::{resultant, MultiPoly};
pub use ratexpr::RatExpr;
