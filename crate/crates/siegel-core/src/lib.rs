//! Numerical harmonic analysis on the Siegel upper half-space.

mod dd;
pub mod error;
pub mod heat;
pub mod integration;
pub mod linalg;
pub mod modular;
pub mod reduction;
pub mod roots;
pub mod spherical;
pub mod supnorm;
pub mod symplectic;

pub use error::{Result, SiegelError};
pub use reduction::{is_minkowski_reduced, minkowski_reduce, siegel_reduce, ReductionResult};
pub use symplectic::{
    act, cross_ratio_spectrum, distance, radial_coordinates, CrossRatioSpectrum, DistanceConvention,
    RadialVector, SiegelPoint, SymplecticMatrix,
};
pub use heat::{HeatKernelQuery, HeatResult};
pub use integration::{Estimate, QuadratureSpec};
pub use num_complex::Complex64;
pub use spherical::{Calibration, FjConfig};
pub use supnorm::{BoundReport, BoundSetting, CuspSum, Exponent};
