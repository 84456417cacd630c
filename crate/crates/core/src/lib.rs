//! Scale calculus on sampled functions.
//!
//! Paths are values on a uniform grid. The operators here act on those
//! samples: quantum differences and the complex scale derivative, scale-law
//! fits and the associated ODEs, the expansion of scale derivatives of
//! composed fields, the quantum bialgebra of difference words, local
//! fractional derivatives and the scale quantization residuals.

pub mod algebra;
pub mod error;
pub mod expansion;
pub mod fractional;
pub mod generators;
pub mod io;
pub mod ode;
pub mod path;
pub mod quantize;
pub mod regression;
pub mod scale_laws;
pub mod scale_ops;
pub mod smoothing;

pub use error::{Error, Result};
pub use path::{ComplexPath, Grid, Path, SampledPath};
pub use scale_ops::{
    minimal_resolution, nondiff_defect, quantum_diff, scale_derivative, MinimalResolution,
    Resolution, ScaleDerivative, Side,
};
