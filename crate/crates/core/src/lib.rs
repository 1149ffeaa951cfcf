//! Helical polygons evolving under the Schrödinger map `T_t = T ∧ T_ss`
//! (equivalently the binormal flow `X_t = X_s ∧ X_ss`) in Minkowski 3-space.

pub mod algebraic;
pub mod analysis;
pub mod error;
pub mod gauss;
pub mod mink;
pub mod one_corner;
pub mod polygon;
pub mod solver;

pub use error::{Error, Result};
pub use gauss::{dirac_comb_at, galilean_shift, gauss_sum, rho_q, CornerLattice, DiracComb, Parity, RationalTime};
pub use mink::{lorentz_rotation, CausalClass, MinkMatrix, MinkVec};
pub use polygon::{sample_initial, Boundary, CurveState, PolygonKind, PolygonSpec};
