//! Exact p-adic harmonic analysis on `Q_p^m`: Schwartz–Bruhat functions,
//! distributions, Schwartz kernels and Λ-wave front sets. Every quantity is
//! computed in `Q(ζ_{p^∞})` with no rounding.

pub mod distribution;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod padic;
pub mod scalar;
pub mod schwartz;
pub mod wavefront;

pub use error::{Error, Result};
pub use scalar::{psi, CycScalar, Rational};
pub use geometry::{BallRelation, Polydisc};
pub use padic::{LambdaGroup, PAdicPoint, Valuation};
pub use schwartz::{SBFunction, Term};
pub use distribution::{CustomPairing, DistAtom, Distribution};
pub use kernel::Kernel;
pub use wavefront::{is_smooth_at, MicrolocalQuery, SmoothnessVerdict};
