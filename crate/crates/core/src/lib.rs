//! Numerical tools for moment-map geometry on quiver representations:
//! gradient flows of `½‖μ_I − α‖²`, classification of their critical points,
//! negative slices, Hecke correspondences, affine projections, Lagrangian
//! membership and handsaw reductions, together with brute-force oracles.

pub mod critical;
pub mod correspondence;
pub mod error;
pub mod fixtures;
pub mod flow;
pub mod handsaw;
pub mod io;
pub mod linalg;
pub mod oracles;
pub mod quiver;
pub mod rep;
pub mod selfcheck;

pub use error::{CorrespondenceError, CriticalError, FlowError, IoError, OracleError, QuiverError, RepError};
pub use quiver::{DimVector, Quiver, StabilityParameter};
pub use rep::{GroupElement, LieElement, Representation, TangentVector};
