//! Grayscale image restoration benchmark toolkit.
//!
//! The crate corrupts a clean image with one of four noise models
//! (Gaussian, Poisson, salt & pepper, speckle), restores it with one of
//! four spatial filters (mean, median, Gaussian, bilateral) and scores
//! every pairing with five full-reference quality metrics
//! (RMSE, MSE, UQI, PSNR, SSIM). The [`bench`] module runs the whole
//! filter x noise matrix and serializes the comparison table together
//! with histogram and plot data.
//!
//! Intensities are real values in `[0, 1]`; 8-bit quantization happens
//! only at PGM file I/O. All core math is generic over the scalar type
//! through [`Intensity`]; the benchmark harness and the CLI use `f64`.

use std::fmt;

pub mod bench;
pub mod error;
pub mod filter;
pub mod image;
pub mod metrics;
pub mod noise;
pub mod numeric;
pub mod pgm;
pub mod rng;

pub use error::{Error, Result};
pub use filter::FilterSpec;
pub use image::{GrayImage, Histogram, Kernel, PaddingPolicy};
pub use metrics::{QualityReport, SsimParams};
pub use noise::NoiseSpec;

/// Scalar type for pixel intensities: `f32` or `f64`.
pub trait Intensity:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl Intensity for f32 {}
impl Intensity for f64 {}

/// Double-precision image, the type used by the benchmark harness and CLI.
pub type GrayImageF64 = GrayImage<f64>;
/// Single-precision image.
pub type GrayImageF32 = GrayImage<f32>;
/// Double-precision convolution kernel.
pub type KernelF64 = Kernel<f64>;
/// Single-precision convolution kernel.
pub type KernelF32 = Kernel<f32>;
