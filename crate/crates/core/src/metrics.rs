//! Full-reference image quality metrics: MSE, RMSE, PSNR, SSIM, UQI.
//!
//! All five operate on normalized intensities, so the PSNR peak
//! defaults to 1.0. Sums are compensated so 10^6-pixel results are
//! reproducible to ~1e-12 regardless of accumulation order.

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::numeric::{scalar, CompensatedSum};
use crate::Intensity;

/// The five metric values for one (reference, test) image pair,
/// in report column order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QualityReport<T = f64> {
    pub rmse: T,
    pub mse: T,
    pub uqi: T,
    pub psnr: T,
    pub ssim: T,
}

/// SSIM configuration: component exponents, stabilizers and the
/// Gaussian sliding window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SsimParams {
    /// Luminance exponent.
    pub alpha: f64,
    /// Contrast exponent.
    pub beta: f64,
    /// Structure exponent.
    pub gamma: f64,
    /// Luminance stabilizer coefficient; C1 = (k1 * L)^2.
    pub k1: f64,
    /// Contrast stabilizer coefficient; C2 = (k2 * L)^2, C3 = C2 / 2.
    pub k2: f64,
    /// Window radius; side = 2 * radius + 1.
    pub window_radius: usize,
    /// Window Gaussian sigma.
    pub window_sigma: f64,
    /// Dynamic range L.
    pub peak: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            k1: 0.01,
            k2: 0.03,
            window_radius: 5, // 11x11 window
            window_sigma: 1.5,
            peak: 1.0,
        }
    }
}

impl SsimParams {
    pub fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.alpha, "alpha"),
            (self.beta, "beta"),
            (self.gamma, "gamma"),
            (self.k1, "k1"),
            (self.k2, "k2"),
            (self.window_sigma, "window sigma"),
            (self.peak, "peak"),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("SSIM {name} must be > 0, got {v}")));
            }
        }
        if self.window_radius == 0 {
            return Err(Error::Parameter("SSIM window radius must be >= 1".into()));
        }
        Ok(())
    }

    pub fn window_side(&self) -> usize {
        2 * self.window_radius + 1
    }
}

fn check_same_shape<T: Intensity>(f: &GrayImage<T>, g: &GrayImage<T>) -> Result<()> {
    if !f.same_dimensions(g) {
        return Err(Error::Shape(format!(
            "image dimensions differ: {}x{} vs {}x{}",
            f.width(),
            f.height(),
            g.width(),
            g.height()
        )));
    }
    Ok(())
}

/// Mean squared error `(1/MN) * sum (f - g)^2`.
pub fn mse<T: Intensity>(f: &GrayImage<T>, g: &GrayImage<T>) -> Result<T> {
    check_same_shape(f, g)?;
    let mut acc = CompensatedSum::new();
    for (&a, &b) in f.pixels().iter().zip(g.pixels()) {
        let d = a - b;
        acc.add(d * d);
    }
    Ok(acc.value() / scalar::<T>(f.pixels().len() as f64))
}

/// Square root of an MSE value.
pub fn rmse_from_mse<T: Intensity>(mse: T) -> T {
    mse.sqrt()
}

/// Root mean squared error.
pub fn rmse<T: Intensity>(f: &GrayImage<T>, g: &GrayImage<T>) -> Result<T> {
    Ok(rmse_from_mse(mse(f, g)?))
}

/// PSNR in decibels from an MSE value: `10 log10(peak^2 / mse)`,
/// infinite when `mse == 0`.
pub fn psnr_from_mse<T: Intensity>(mse: T, peak: T) -> T {
    if mse <= T::zero() {
        T::infinity()
    } else {
        scalar::<T>(10.0) * (peak * peak / mse).log10()
    }
}

/// Peak signal-to-noise ratio against a reference; `peak` is the
/// maximum possible intensity (1.0 in the normalized domain).
pub fn psnr<T: Intensity>(f: &GrayImage<T>, g: &GrayImage<T>, peak: T) -> Result<T> {
    if !(peak > T::zero()) {
        return Err(Error::Parameter(format!("peak must be > 0, got {peak}")));
    }
    Ok(psnr_from_mse(mse(f, g)?, peak))
}

/// Weighted sums over every valid window position (separable pass).
/// Returns a `(w - 2r) x (h - 2r)` buffer.
fn separable_valid<T: Intensity>(
    values: &[T],
    width: usize,
    height: usize,
    taps: &[T],
    radius: usize,
) -> Vec<T> {
    let side = 2 * radius + 1;
    let out_w = width - 2 * radius;
    let out_h = height - 2 * radius;
    // horizontal pass: rows stay full height
    let mut horiz = vec![T::zero(); out_w * height];
    for y in 0..height {
        let row = &values[y * width..(y + 1) * width];
        for x0 in 0..out_w {
            let mut acc = T::zero();
            for (i, &w) in taps.iter().enumerate().take(side) {
                acc = acc + w * row[x0 + i];
            }
            horiz[y * out_w + x0] = acc;
        }
    }
    // vertical pass
    let mut out = vec![T::zero(); out_w * out_h];
    for y0 in 0..out_h {
        for x0 in 0..out_w {
            let mut acc = T::zero();
            for (j, &w) in taps.iter().enumerate().take(side) {
                acc = acc + w * horiz[(y0 + j) * out_w + x0];
            }
            out[y0 * out_w + x0] = acc;
        }
    }
    out
}

#[inline]
fn pow_or_id<T: Intensity>(v: T, e: f64) -> T {
    if e == 1.0 {
        v
    } else {
        v.powf(scalar::<T>(e))
    }
}

/// Structural similarity index: mean over all sliding windows of
/// `l^alpha * c^beta * s^gamma` with the standard stabilized component
/// definitions. Result in `[-1, 1]`; 1 for identical images.
pub fn ssim<T: Intensity>(f: &GrayImage<T>, g: &GrayImage<T>, params: &SsimParams) -> Result<T> {
    check_same_shape(f, g)?;
    params.validate()?;
    let side = params.window_side();
    if f.width() < side || f.height() < side {
        return Err(Error::Shape(format!(
            "image {}x{} smaller than the {side}x{side} SSIM window",
            f.width(),
            f.height()
        )));
    }
    let r = params.window_radius;
    // normalized 1-D taps; the 2-D window is their outer product, which
    // equals the normalized 2-D Gaussian exactly
    let taps: Vec<T> = {
        let mut t = Vec::with_capacity(side);
        for i in -(r as isize)..=(r as isize) {
            let d = i as f64;
            t.push(scalar::<T>(
                (-d * d / (2.0 * params.window_sigma * params.window_sigma)).exp(),
            ));
        }
        let mut sum = CompensatedSum::new();
        for &w in &t {
            sum.add(w);
        }
        let total = sum.value();
        t.into_iter().map(|w| w / total).collect()
    };

    let (w, h) = f.dimensions();
    let fp = f.pixels();
    let gp = g.pixels();
    let ff: Vec<T> = fp.iter().map(|&a| a * a).collect();
    let gg: Vec<T> = gp.iter().map(|&a| a * a).collect();
    let fg: Vec<T> = fp.iter().zip(gp).map(|(&a, &b)| a * b).collect();

    let mu_f = separable_valid(fp, w, h, &taps, r);
    let mu_g = separable_valid(gp, w, h, &taps, r);
    let m_ff = separable_valid(&ff, w, h, &taps, r);
    let m_gg = separable_valid(&gg, w, h, &taps, r);
    let m_fg = separable_valid(&fg, w, h, &taps, r);

    let c1 = scalar::<T>((params.k1 * params.peak) * (params.k1 * params.peak));
    let c2 = scalar::<T>((params.k2 * params.peak) * (params.k2 * params.peak));
    let c3 = c2 / scalar::<T>(2.0);
    let two = scalar::<T>(2.0);

    let mut acc = CompensatedSum::new();
    for i in 0..mu_f.len() {
        let (uf, ug) = (mu_f[i], mu_g[i]);
        let var_f = (m_ff[i] - uf * uf).max(T::zero());
        let var_g = (m_gg[i] - ug * ug).max(T::zero());
        let cov = m_fg[i] - uf * ug;
        let (sf, sg) = (var_f.sqrt(), var_g.sqrt());
        let l = (two * uf * ug + c1) / (uf * uf + ug * ug + c1);
        let c = (two * sf * sg + c2) / (var_f + var_g + c2);
        let s = (cov + c3) / (sf * sg + c3);
        let v = pow_or_id(l, params.alpha) * pow_or_id(c, params.beta) * pow_or_id(s, params.gamma);
        acc.add(v);
    }
    let mean = acc.value() / scalar::<T>(mu_f.len() as f64);
    Ok(mean.min(T::one()).max(-T::one()))
}

/// Universal image quality index, computed globally in the cancelled
/// form `Q = 4 sigma_fg f_bar g_bar / ((sigma_f^2 + sigma_g^2)(f_bar^2 + g_bar^2))`.
///
/// Special cases: two constant images give 1 when equal and 0 when
/// not.
pub fn uqi<T: Intensity>(f: &GrayImage<T>, g: &GrayImage<T>) -> Result<T> {
    check_same_shape(f, g)?;
    let fp = f.pixels();
    let gp = g.pixels();
    let constant = |p: &[T]| p.iter().all(|&v| v == p[0]);
    if constant(fp) && constant(gp) {
        return Ok(if fp[0] == gp[0] { T::one() } else { T::zero() });
    }
    let n = scalar::<T>(fp.len() as f64);
    let mut sf = CompensatedSum::new();
    let mut sg = CompensatedSum::new();
    let mut sff = CompensatedSum::new();
    let mut sgg = CompensatedSum::new();
    let mut sfg = CompensatedSum::new();
    for (&a, &b) in fp.iter().zip(gp) {
        sf.add(a);
        sg.add(b);
        sff.add(a * a);
        sgg.add(b * b);
        sfg.add(a * b);
    }
    let mf = sf.value() / n;
    let mg = sg.value() / n;
    let var_f = (sff.value() / n - mf * mf).max(T::zero());
    let var_g = (sgg.value() / n - mg * mg).max(T::zero());
    let cov = sfg.value() / n - mf * mg;
    let four = scalar::<T>(4.0);
    let q = (four * cov * mf * mg) / ((var_f + var_g) * (mf * mf + mg * mg));
    Ok(q.min(T::one()).max(-T::one()))
}

/// All five metrics for one image pair; `peak` plays the PSNR role of
/// the maximum intensity and defaults to 1.0 in the normalized domain.
pub fn full_report<T: Intensity>(
    f: &GrayImage<T>,
    g: &GrayImage<T>,
    peak: T,
    params: &SsimParams,
) -> Result<QualityReport<T>> {
    if !(peak > T::zero()) {
        return Err(Error::Parameter(format!("peak must be > 0, got {peak}")));
    }
    let mse_v = mse(f, g)?;
    Ok(QualityReport {
        rmse: rmse_from_mse(mse_v),
        mse: mse_v,
        uqi: uqi(f, g)?,
        psnr: psnr_from_mse(mse_v, peak),
        ssim: ssim(f, g, params)?,
    })
}
