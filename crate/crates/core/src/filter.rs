//! Spatial restoration filters: mean, median, Gaussian and bilateral.

use crate::error::{Error, Result};
use crate::image::{GrayImage, Kernel, PaddingPolicy};
use crate::numeric::{scalar, CompensatedSum};
use crate::Intensity;

/// Default mean/median window side.
pub const DEFAULT_WINDOW: usize = 3;
/// Default Gaussian filter sigma.
pub const DEFAULT_GAUSSIAN_SIGMA: f64 = 1.0;
/// Default bilateral spatial sigma.
pub const DEFAULT_BILATERAL_SIGMA_S: f64 = 2.0;
/// Default bilateral range sigma, in normalized intensity units.
pub const DEFAULT_BILATERAL_SIGMA_R: f64 = 0.2;

/// Radius used when none is given: `ceil(3 * sigma)`.
pub fn default_radius(sigma: f64) -> usize {
    (3.0 * sigma).ceil().max(1.0) as usize
}

/// One spatial filter with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum FilterSpec {
    /// Arithmetic mean over an `m x n` window (m rows, n columns).
    Mean { m: usize, n: usize },
    /// Median over an `m x n` window.
    Median { m: usize, n: usize },
    /// Convolution with a normalized Gaussian kernel.
    Gaussian { sigma: f64, radius: usize },
    /// Edge-preserving bilateral filter.
    Bilateral {
        sigma_s: f64,
        sigma_r: f64,
        radius: usize,
    },
}

impl FilterSpec {
    /// The four filters at their default settings, in report order.
    pub fn defaults() -> Vec<FilterSpec> {
        vec![
            FilterSpec::Mean {
                m: DEFAULT_WINDOW,
                n: DEFAULT_WINDOW,
            },
            FilterSpec::Gaussian {
                sigma: DEFAULT_GAUSSIAN_SIGMA,
                radius: default_radius(DEFAULT_GAUSSIAN_SIGMA),
            },
            FilterSpec::Median {
                m: DEFAULT_WINDOW,
                n: DEFAULT_WINDOW,
            },
            FilterSpec::Bilateral {
                sigma_s: DEFAULT_BILATERAL_SIGMA_S,
                sigma_r: DEFAULT_BILATERAL_SIGMA_R,
                radius: default_radius(DEFAULT_BILATERAL_SIGMA_S),
            },
        ]
    }

    pub fn label(&self) -> &'static str {
        match self {
            FilterSpec::Mean { .. } => "mean",
            FilterSpec::Median { .. } => "median",
            FilterSpec::Gaussian { .. } => "gaussian",
            FilterSpec::Bilateral { .. } => "bilateral",
        }
    }

    /// Human-readable parameter listing for provenance output.
    pub fn describe(&self) -> String {
        match self {
            FilterSpec::Mean { m, n } => format!("mean: window = {m}x{n}"),
            FilterSpec::Median { m, n } => format!("median: window = {m}x{n}"),
            FilterSpec::Gaussian { sigma, radius } => {
                format!("gaussian: sigma = {sigma}, radius = {radius}")
            }
            FilterSpec::Bilateral {
                sigma_s,
                sigma_r,
                radius,
            } => format!("bilateral: sigma_s = {sigma_s}, sigma_r = {sigma_r}, radius = {radius}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FilterSpec::Mean { m, n } | FilterSpec::Median { m, n } => check_window(m, n),
            FilterSpec::Gaussian { sigma, radius } => {
                check_sigma(sigma, "sigma")?;
                check_radius(radius)
            }
            FilterSpec::Bilateral {
                sigma_s,
                sigma_r,
                radius,
            } => {
                check_sigma(sigma_s, "sigma_s")?;
                check_sigma(sigma_r, "sigma_r")?;
                check_radius(radius)
            }
        }
    }

    /// Run this filter.
    pub fn apply<T: Intensity>(
        &self,
        img: &GrayImage<T>,
        policy: PaddingPolicy,
    ) -> Result<GrayImage<T>> {
        match *self {
            FilterSpec::Mean { m, n } => mean_filter(img, m, n, policy),
            FilterSpec::Median { m, n } => median_filter(img, m, n, policy),
            FilterSpec::Gaussian { sigma, radius } => gaussian_filter(img, sigma, radius, policy),
            FilterSpec::Bilateral {
                sigma_s,
                sigma_r,
                radius,
            } => bilateral_filter(img, sigma_s, sigma_r, radius, policy),
        }
    }
}

fn check_window(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 || m % 2 == 0 || n % 2 == 0 {
        return Err(Error::Parameter(format!(
            "window dimensions must be odd and >= 1 so the window is centered, got {m}x{n}"
        )));
    }
    Ok(())
}

fn check_sigma(sigma: f64, name: &str) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Parameter(format!("{name} must be > 0, got {sigma}")));
    }
    Ok(())
}

fn check_radius(radius: usize) -> Result<()> {
    if radius == 0 {
        return Err(Error::Parameter("radius must be >= 1".into()));
    }
    Ok(())
}

/// Arithmetic mean of the `m x n` neighborhood of every pixel.
pub fn mean_filter<T: Intensity>(
    img: &GrayImage<T>,
    m: usize,
    n: usize,
    policy: PaddingPolicy,
) -> Result<GrayImage<T>> {
    check_window(m, n)?;
    let (ry, rx) = ((m / 2) as isize, (n / 2) as isize);
    let inv = T::one() / scalar::<T>((m * n) as f64);
    let out = GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let mut acc = CompensatedSum::new();
        for t in -ry..=ry {
            for s in -rx..=rx {
                acc.add(img.pad_lookup(x as isize + s, y as isize + t, policy));
            }
        }
        acc.value() * inv
    })?;
    Ok(out)
}

/// Median of the `m x n` neighborhood of every pixel. `m * n` is odd,
/// so the median is the middle order statistic.
pub fn median_filter<T: Intensity>(
    img: &GrayImage<T>,
    m: usize,
    n: usize,
    policy: PaddingPolicy,
) -> Result<GrayImage<T>> {
    check_window(m, n)?;
    let (ry, rx) = ((m / 2) as isize, (n / 2) as isize);
    let mut window = Vec::with_capacity(m * n);
    let mut pixels = Vec::with_capacity(img.width() * img.height());
    for y in 0..img.height() as isize {
        for x in 0..img.width() as isize {
            window.clear();
            for t in -ry..=ry {
                for s in -rx..=rx {
                    window.push(img.pad_lookup(x + s, y + t, policy));
                }
            }
            // pixels are finite by invariant, total order exists
            window.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite pixels"));
            pixels.push(window[window.len() / 2]);
        }
    }
    GrayImage::from_pixels(img.width(), img.height(), pixels)
}

/// Normalized Gaussian kernel: `w(s, t) ~ exp(-(s^2 + t^2) / (2 sigma^2))`
/// on `[-radius, radius]^2`, renormalized to sum to 1.
pub fn gaussian_kernel<T: Intensity>(sigma: f64, radius: usize) -> Result<Kernel<T>> {
    check_sigma(sigma, "sigma")?;
    check_radius(radius)?;
    let r = radius as isize;
    let two_sigma_sq = scalar::<T>(2.0 * sigma * sigma);
    let mut weights = Vec::with_capacity((2 * radius + 1) * (2 * radius + 1));
    for t in -r..=r {
        for s in -r..=r {
            let d2 = scalar::<T>((s * s + t * t) as f64);
            weights.push((-d2 / two_sigma_sq).exp());
        }
    }
    let mut sum = CompensatedSum::new();
    for &w in &weights {
        sum.add(w);
    }
    let total = sum.value();
    for w in &mut weights {
        *w = *w / total;
    }
    Kernel::new(radius, radius, weights)
}

/// Gaussian smoothing: convolution with [`gaussian_kernel`].
pub fn gaussian_filter<T: Intensity>(
    img: &GrayImage<T>,
    sigma: f64,
    radius: usize,
    policy: PaddingPolicy,
) -> Result<GrayImage<T>> {
    let kernel = gaussian_kernel(sigma, radius)?;
    Ok(img.convolve(&kernel, policy))
}

/// Bilateral filter:
/// `out(p) = (1/W_p) * sum_q Gs(||p - q||) Gr(|I_p - I_q|) I_q` with
/// `W_p` the sum of the combined weights. Both `G`s are the
/// unnormalized `exp(-d^2 / 2 sigma^2)`; the spatial one is
/// precomputed, the range one depends on the center intensity.
pub fn bilateral_filter<T: Intensity>(
    img: &GrayImage<T>,
    sigma_s: f64,
    sigma_r: f64,
    radius: usize,
    policy: PaddingPolicy,
) -> Result<GrayImage<T>> {
    check_sigma(sigma_s, "sigma_s")?;
    check_sigma(sigma_r, "sigma_r")?;
    check_radius(radius)?;
    let r = radius as isize;
    let side = 2 * radius + 1;
    let two_ss = scalar::<T>(2.0 * sigma_s * sigma_s);
    let two_sr = scalar::<T>(2.0 * sigma_r * sigma_r);
    let mut spatial = Vec::with_capacity(side * side);
    for t in -r..=r {
        for s in -r..=r {
            let d2 = scalar::<T>((s * s + t * t) as f64);
            spatial.push((-d2 / two_ss).exp());
        }
    }
    let out = GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let center = img.get(x, y);
        let mut num = CompensatedSum::new();
        let mut den = CompensatedSum::new();
        for t in -r..=r {
            for s in -r..=r {
                let q = img.pad_lookup(x as isize + s, y as isize + t, policy);
                let diff = center - q;
                let gr = (-(diff * diff) / two_sr).exp();
                let w = spatial[((t + r) * (2 * r + 1) + (s + r)) as usize] * gr;
                num.add(w * q);
                den.add(w);
            }
        }
        num.value() / den.value()
    })?;
    Ok(out)
}
