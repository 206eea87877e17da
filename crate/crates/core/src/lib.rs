//! Reconstruction of a textured 3D surface from an uncalibrated stereo pair of
//! degraded (underwater-style) images.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`enhance`] — moire removal, homomorphic illumination correction,
//!    bivariate-shrinkage wavelet denoising, anisotropic diffusion, contrast
//!    stretching and color-mean equalization.
//! 2. [`tiepoints`] — Harris corners, NCC window matching and robust
//!    (consensus-based) outlier rejection, producing sparse correspondences.
//! 3. [`rectify`] — quasi-Euclidean epipolar rectification of the uncalibrated
//!    pair: six parameters (five angles + focal) estimated by
//!    Levenberg-Marquardt on the Sampson error, then both images warped so
//!    epipolar lines are horizontal and row-aligned.
//! 4. [`gcstereo`] — dense integer disparity by alpha-expansion graph cuts
//!    over an in-house max-flow solver.
//! 5. [`depth`] — disparity-to-depth triangulation, median smoothing, Delaunay
//!    meshing and texture mapping, PLY export.
//!
//! [`raster`] holds the shared image type and file I/O; [`synth`] generates
//! seeded synthetic scenes with exact ground truth; [`pipeline`] wires the
//! stages together behind a JSON configuration.

pub mod depth;
pub mod enhance;
pub mod epipolar;
mod error;
pub(crate) mod fft2;
pub mod gcstereo;
pub mod pipeline;
pub mod raster;
pub mod rectify;
pub mod synth;
pub mod tiepoints;

pub use error::{Error, Result};
