//! Noise models: Gaussian, Poisson, salt & pepper and speckle, plus
//! the composite degradation (blur then noise).
//!
//! Every sampler is a pure function of `(image, parameters, seed)`:
//! pixel `i` draws from the stream keyed by `(seed, i)`, so output is
//! bit-identical under any traversal or parallel partitioning.

use crate::error::{Error, Result};
use crate::image::{GrayImage, Kernel, PaddingPolicy};
use crate::numeric::{ln_gamma, scalar};
use crate::rng::PixelStream;
use crate::Intensity;

/// Default Gaussian noise sigma.
pub const DEFAULT_GAUSSIAN_SIGMA: f64 = 0.05;
/// Default Poisson peak (expected photon count at intensity 1.0).
pub const DEFAULT_POISSON_PEAK: f64 = 255.0;
/// Default per-pixel pepper probability; salt uses the same value.
pub const DEFAULT_SALT_PEPPER_P: f64 = 0.008;
/// Default speckle multiplier variance.
pub const DEFAULT_SPECKLE_VARIANCE: f64 = 0.01;

/// One noise model with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum NoiseSpec {
    /// Additive zero-mean-by-default Gaussian noise.
    Gaussian { mean: f64, sigma: f64 },
    /// Signal-dependent photon noise; `peak` is the expected count at
    /// intensity 1.0.
    Poisson { peak: f64 },
    /// Impulse noise: pixels become `a` (pepper) with probability
    /// `p_a`, `b` (salt) with probability `p_b`.
    SaltPepper { p_a: f64, p_b: f64, a: f64, b: f64 },
    /// Multiplicative noise `j = i + mu * i` with zero-mean uniform
    /// `mu` of the given variance.
    Speckle { variance: f64 },
}

impl NoiseSpec {
    /// The four models at their default settings, in report order.
    pub fn defaults() -> Vec<NoiseSpec> {
        vec![
            NoiseSpec::Gaussian {
                mean: 0.0,
                sigma: DEFAULT_GAUSSIAN_SIGMA,
            },
            NoiseSpec::Poisson {
                peak: DEFAULT_POISSON_PEAK,
            },
            NoiseSpec::SaltPepper {
                p_a: DEFAULT_SALT_PEPPER_P,
                p_b: DEFAULT_SALT_PEPPER_P,
                a: 0.0,
                b: 1.0,
            },
            NoiseSpec::Speckle {
                variance: DEFAULT_SPECKLE_VARIANCE,
            },
        ]
    }

    pub fn label(&self) -> &'static str {
        match self {
            NoiseSpec::Gaussian { .. } => "gaussian",
            NoiseSpec::Poisson { .. } => "poisson",
            NoiseSpec::SaltPepper { .. } => "salt_pepper",
            NoiseSpec::Speckle { .. } => "speckle",
        }
    }

    /// Human-readable parameter listing for provenance output.
    pub fn describe(&self) -> String {
        match self {
            NoiseSpec::Gaussian { mean, sigma } => {
                format!("gaussian: mean = {mean}, sigma = {sigma}")
            }
            NoiseSpec::Poisson { peak } => format!("poisson: peak = {peak}"),
            NoiseSpec::SaltPepper { p_a, p_b, a, b } => {
                format!("salt_pepper: p_a = {p_a}, p_b = {p_b}, a = {a}, b = {b}")
            }
            NoiseSpec::Speckle { variance } => format!("speckle: variance = {variance}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::Gaussian { mean, sigma } => {
                if !mean.is_finite() {
                    return Err(Error::Parameter("gaussian mean must be finite".into()));
                }
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::Parameter(format!(
                        "gaussian sigma must be > 0, got {sigma}"
                    )));
                }
            }
            NoiseSpec::Poisson { peak } => {
                if !(peak > 0.0 && peak.is_finite()) {
                    return Err(Error::Parameter(format!(
                        "poisson peak must be > 0, got {peak}"
                    )));
                }
            }
            NoiseSpec::SaltPepper { p_a, p_b, a, b } => {
                if !(p_a >= 0.0 && p_b >= 0.0) || !(p_a.is_finite() && p_b.is_finite()) {
                    return Err(Error::Parameter(
                        "salt/pepper probabilities must be >= 0".into(),
                    ));
                }
                if p_a + p_b > 1.0 {
                    return Err(Error::Parameter(format!(
                        "p_a + p_b must be <= 1, got {}",
                        p_a + p_b
                    )));
                }
                if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a >= b {
                    return Err(Error::Parameter(format!(
                        "impulse values need 0 <= a < b <= 1, got a = {a}, b = {b}"
                    )));
                }
            }
            NoiseSpec::Speckle { variance } => {
                if !(variance >= 0.0 && variance.is_finite()) {
                    return Err(Error::Parameter(format!(
                        "speckle variance must be >= 0, got {variance}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Corrupt `img` with this noise model.
    pub fn apply<T: Intensity>(&self, img: &GrayImage<T>, seed: u64) -> Result<GrayImage<T>> {
        match *self {
            NoiseSpec::Gaussian { mean, sigma } => add_gaussian(img, mean, sigma, seed),
            NoiseSpec::Poisson { peak } => add_poisson(img, peak, seed),
            NoiseSpec::SaltPepper { p_a, p_b, a, b } => {
                add_salt_pepper(img, p_a, p_b, a, b, seed)
            }
            NoiseSpec::Speckle { variance } => add_speckle(img, variance, seed),
        }
    }
}

fn clip_unit<T: Intensity>(v: T) -> T {
    v.min(T::one()).max(T::zero())
}

/// Additive Gaussian noise: `g = clip(f + n)` with
/// `n ~ N(mean, sigma^2)` drawn independently per pixel.
pub fn add_gaussian<T: Intensity>(
    img: &GrayImage<T>,
    mean: f64,
    sigma: f64,
    seed: u64,
) -> Result<GrayImage<T>> {
    NoiseSpec::Gaussian { mean, sigma }.validate()?;
    let pixels = img
        .pixels()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let n = PixelStream::new(seed, i as u64).next_normal(mean, sigma);
            clip_unit(p + scalar::<T>(n))
        })
        .collect();
    GrayImage::from_pixels(img.width(), img.height(), pixels)
}

/// Photon noise: each output pixel is `Poisson(f * peak) / peak`,
/// clipped. Requires pixels in `[0, 1]` (clip first).
pub fn add_poisson<T: Intensity>(img: &GrayImage<T>, peak: f64, seed: u64) -> Result<GrayImage<T>> {
    NoiseSpec::Poisson { peak }.validate()?;
    let mut pixels = Vec::with_capacity(img.pixels().len());
    for (i, &p) in img.pixels().iter().enumerate() {
        let f = p.to_f64().unwrap_or(f64::NAN);
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Range(format!(
                "pixel {i} = {f} outside [0, 1]; clip before applying Poisson noise"
            )));
        }
        let count = PixelStream::new(seed, i as u64).next_poisson(f * peak);
        pixels.push(clip_unit(scalar::<T>(count as f64 / peak)));
    }
    GrayImage::from_pixels(img.width(), img.height(), pixels)
}

/// Impulse noise. Per pixel one uniform draw `u`: `u < p_a` gives the
/// pepper value `a`, `u < p_a + p_b` the salt value `b`, otherwise the
/// pixel is unchanged, so no pixel can be both.
pub fn add_salt_pepper<T: Intensity>(
    img: &GrayImage<T>,
    p_a: f64,
    p_b: f64,
    a: f64,
    b: f64,
    seed: u64,
) -> Result<GrayImage<T>> {
    NoiseSpec::SaltPepper { p_a, p_b, a, b }.validate()?;
    let pepper = scalar::<T>(a);
    let salt = scalar::<T>(b);
    let pixels = img
        .pixels()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let u = PixelStream::new(seed, i as u64).next_unit();
            if u < p_a {
                pepper
            } else if u < p_a + p_b {
                salt
            } else {
                p
            }
        })
        .collect();
    GrayImage::from_pixels(img.width(), img.height(), pixels)
}

/// Speckle noise: `j = clip(i + mu * i)` with `mu` i.i.d. uniform on
/// `[-sqrt(3v), +sqrt(3v)]`, the zero-mean uniform with variance `v`.
pub fn add_speckle<T: Intensity>(
    img: &GrayImage<T>,
    variance: f64,
    seed: u64,
) -> Result<GrayImage<T>> {
    NoiseSpec::Speckle { variance }.validate()?;
    let half_width = (3.0 * variance).sqrt();
    let pixels = img
        .pixels()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let u = PixelStream::new(seed, i as u64).next_unit();
            let mu = scalar::<T>((2.0 * u - 1.0) * half_width);
            clip_unit(p + mu * p)
        })
        .collect();
    GrayImage::from_pixels(img.width(), img.height(), pixels)
}

/// Gaussian probability density at `z`.
pub fn gaussian_pdf(z: f64, mean: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Parameter(format!("sigma must be > 0, got {sigma}")));
    }
    let d = (z - mean) / sigma;
    Ok((-0.5 * d * d).exp() / ((2.0 * std::f64::consts::PI).sqrt() * sigma))
}

/// Poisson probability mass `lambda^x e^(-lambda) / x!`, evaluated in
/// log space for large `x`.
pub fn poisson_pmf(x: u64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("lambda must be > 0, got {lambda}")));
    }
    if x == 0 {
        return Ok((-lambda).exp());
    }
    let xf = x as f64;
    Ok((xf * lambda.ln() - lambda - ln_gamma(xf + 1.0)).exp())
}

/// The degradation model: convolve with `h`, then corrupt. The noise
/// stage is additive for Gaussian/Poisson/salt & pepper and
/// multiplicative for speckle, exactly as the standalone samplers
/// define it, so an identity kernel reduces bit-for-bit to the noise
/// op alone. Borders replicate.
pub fn degrade<T: Intensity>(
    img: &GrayImage<T>,
    h: &Kernel<T>,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<GrayImage<T>> {
    noise.validate()?;
    let blurred = img.convolve(h, PaddingPolicy::Replicate);
    noise.apply(&blurred, seed)
}
