//! Rotational constant-mean-curvature spheres in `S²×R` and `H²×R`.
//!
//! * [`profile`]: generating curves and their pointwise geometry
//! * [`integrals`]: area, volume and curvature integrals by quadrature
//! * [`closedform`]: exact area as a function of `H`, and the critical `H₀`
//! * [`spectrum`]: Jacobi operator spectrum by Fourier-mode separation
//! * [`stability`]: volume-constrained stability verdicts
//! * [`topology`]: genus bounds for closed stable CMC surfaces

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closedform;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod integrals;
pub mod manifest;
pub mod profile;
pub mod quadrature;
pub mod spectrum;
pub mod stability;
pub mod topology;

pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::{ricci_normal, sectional_tangent, sn_kappa, SpaceForm};
pub use profile::{generate_profile, horizontal_slice, ProfileCurve, ProfileSample};
