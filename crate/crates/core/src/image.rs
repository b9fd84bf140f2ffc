//! Image representation, padding, convolution and histograms.

use crate::error::{Error, Result};
use crate::numeric::{scalar, CompensatedSum};
use crate::Intensity;

/// Border handling for windowed operations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PaddingPolicy {
    /// Clamp to the nearest edge pixel.
    #[default]
    Replicate,
    /// Mirror across the border without repeating the edge pixel
    /// (`[a, b, c]` read at x = -1 gives `b`).
    Reflect,
    /// Outside pixels read as 0.
    Zero,
}

impl PaddingPolicy {
    pub fn label(self) -> &'static str {
        match self {
            PaddingPolicy::Replicate => "replicate",
            PaddingPolicy::Reflect => "reflect",
            PaddingPolicy::Zero => "zero",
        }
    }
}

/// Fold a possibly out-of-range coordinate into `[0, len)`.
#[inline]
fn resolve_index(i: isize, len: usize, policy: PaddingPolicy) -> Option<usize> {
    let n = len as isize;
    if (0..n).contains(&i) {
        return Some(i as usize);
    }
    match policy {
        PaddingPolicy::Zero => None,
        PaddingPolicy::Replicate => Some(i.clamp(0, n - 1) as usize),
        PaddingPolicy::Reflect => {
            if n == 1 {
                return Some(0);
            }
            // mirror about the first/last sample; period 2(n-1)
            let period = 2 * (n - 1);
            let mut m = i.rem_euclid(period);
            if m >= n {
                m = period - m;
            }
            Some(m as usize)
        }
    }
}

/// A grayscale image: row-major intensities with nominal range `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage<T = f64> {
    width: usize,
    height: usize,
    pixels: Vec<T>,
}

impl<T: Intensity> GrayImage<T> {
    /// Constant-filled image. Errors on a zero dimension or a
    /// non-finite fill value.
    pub fn new(width: usize, height: usize, fill: T) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "image dimensions must be >= 1, got {width}x{height}"
            )));
        }
        if !fill.is_finite() {
            return Err(Error::Parameter("fill value must be finite".into()));
        }
        Ok(Self {
            width,
            height,
            pixels: vec![fill; width * height],
        })
    }

    /// Wrap an existing row-major pixel buffer.
    pub fn from_pixels(width: usize, height: usize, pixels: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "image dimensions must be >= 1, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::Dimension(format!(
                "pixel buffer length {} != {width}x{height}",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Build an image by evaluating `f(x, y)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "image dimensions must be >= 1, got {width}x{height}"
            )));
        }
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[T] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [T] {
        &mut self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: T) {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[y * self.width + x] = value;
    }

    pub fn same_dimensions(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// New image with every pixel transformed by `f`.
    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| f(p)).collect(),
        }
    }

    /// Clamp every pixel into `[0, 1]`.
    pub fn clip(&self) -> Self {
        let one = T::one();
        let zero = T::zero();
        self.map(|p| p.min(one).max(zero))
    }

    /// Read a pixel at a possibly out-of-bounds coordinate, resolved
    /// by the padding policy.
    #[inline]
    pub fn pad_lookup(&self, x: isize, y: isize, policy: PaddingPolicy) -> T {
        match (
            resolve_index(x, self.width, policy),
            resolve_index(y, self.height, policy),
        ) {
            (Some(xi), Some(yi)) => self.pixels[yi * self.width + xi],
            _ => T::zero(),
        }
    }

    /// Convolve with `kernel`: `out(x, y) = sum_{s,t} k(s, t) * img(x - s, y - t)`,
    /// same-size output, borders via `policy`.
    pub fn convolve(&self, kernel: &Kernel<T>, policy: PaddingPolicy) -> Self {
        let rx = kernel.radius_x() as isize;
        let ry = kernel.radius_y() as isize;
        let mut out = Vec::with_capacity(self.pixels.len());
        for y in 0..self.height as isize {
            for x in 0..self.width as isize {
                let mut acc = T::zero();
                for t in -ry..=ry {
                    for s in -rx..=rx {
                        let w = kernel.weight(s, t);
                        acc = acc + w * self.pad_lookup(x - s, y - t, policy);
                    }
                }
                out.push(acc);
            }
        }
        Self {
            width: self.width,
            height: self.height,
            pixels: out,
        }
    }

    /// Intensity histogram over `[0, 1]`: pixel `p` lands in bin
    /// `min(bins - 1, floor(p * bins))`. Pixels must already be clipped.
    pub fn histogram(&self, bins: usize) -> Result<Histogram> {
        if bins == 0 {
            return Err(Error::Parameter("histogram needs at least one bin".into()));
        }
        let mut counts = vec![0u64; bins];
        let nbins = scalar::<T>(bins as f64);
        for &p in &self.pixels {
            let idx = (p * nbins)
                .floor()
                .to_f64()
                .map(|v| v.max(0.0) as usize)
                .unwrap_or(0)
                .min(bins - 1);
            counts[idx] += 1;
        }
        Ok(Histogram { counts })
    }

    /// Arithmetic mean of all pixels (compensated).
    pub fn mean(&self) -> T {
        let mut acc = CompensatedSum::new();
        for &p in &self.pixels {
            acc.add(p);
        }
        acc.value() / scalar::<T>(self.pixels.len() as f64)
    }
}

/// Convolution kernel with odd side lengths `(2rx + 1) x (2ry + 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel<T = f64> {
    radius_x: usize,
    radius_y: usize,
    // row-major, rows indexed by the vertical offset t
    weights: Vec<T>,
}

impl<T: Intensity> Kernel<T> {
    /// Kernel from row-major weights of length `(2rx + 1) * (2ry + 1)`.
    pub fn new(radius_x: usize, radius_y: usize, weights: Vec<T>) -> Result<Self> {
        let expect = (2 * radius_x + 1) * (2 * radius_y + 1);
        if weights.len() != expect {
            return Err(Error::Dimension(format!(
                "kernel weight count {} != {expect}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Parameter("kernel weights must be finite".into()));
        }
        Ok(Self {
            radius_x,
            radius_y,
            weights,
        })
    }

    /// The delta kernel; convolution with it is the identity map.
    pub fn identity() -> Self {
        Self {
            radius_x: 0,
            radius_y: 0,
            weights: vec![T::one()],
        }
    }

    /// Uniform averaging kernel: every weight `1 / ((2rx+1)(2ry+1))`.
    pub fn box_mean(radius_x: usize, radius_y: usize) -> Self {
        let n = (2 * radius_x + 1) * (2 * radius_y + 1);
        let w = T::one() / scalar::<T>(n as f64);
        Self {
            radius_x,
            radius_y,
            weights: vec![w; n],
        }
    }

    pub fn radius_x(&self) -> usize {
        self.radius_x
    }

    pub fn radius_y(&self) -> usize {
        self.radius_y
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Weight at offset `(s, t)`, `s` horizontal in `[-rx, rx]`,
    /// `t` vertical in `[-ry, ry]`.
    #[inline]
    pub fn weight(&self, s: isize, t: isize) -> T {
        debug_assert!(s.unsigned_abs() <= self.radius_x && t.unsigned_abs() <= self.radius_y);
        let row = (t + self.radius_y as isize) as usize;
        let col = (s + self.radius_x as isize) as usize;
        self.weights[row * (2 * self.radius_x + 1) + col]
    }

    /// Sum of all weights (compensated).
    pub fn weight_sum(&self) -> T {
        let mut acc = CompensatedSum::new();
        for &w in &self.weights {
            acc.add(w);
        }
        acc.value()
    }
}

/// Pixel-count histogram over the intensity range `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    counts: Vec<u64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn img(w: usize, h: usize, px: &[f64]) -> GrayImage<f64> {
        GrayImage::from_pixels(w, h, px.to_vec()).unwrap()
    }

    #[test]
    fn new_image_constant_fill() {
        let im = GrayImage::new(2, 2, 0.0f64).unwrap();
        assert_eq!(im.pixels(), &[0.0; 4]);
        let im = GrayImage::new(1, 1, 0.5f64).unwrap();
        assert_eq!(im.get(0, 0), 0.5);
    }

    #[test]
    fn new_image_rejects_zero_dimension() {
        assert!(matches!(
            GrayImage::new(0, 3, 0.0f64),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn clip_clamps_into_unit_range() {
        let im = img(3, 1, &[1.3, -0.2, 0.4]);
        assert_eq!(im.clip().pixels(), &[1.0, 0.0, 0.4]);
    }

    #[test]
    fn pad_lookup_policies() {
        let row = img(3, 1, &[0.1, 0.2, 0.3]);
        assert_eq!(row.pad_lookup(-1, 0, PaddingPolicy::Replicate), 0.1);
        assert_eq!(row.pad_lookup(-1, 0, PaddingPolicy::Zero), 0.0);
        // mirror without repeating the edge: -1 -> 1
        assert_eq!(row.pad_lookup(-1, 0, PaddingPolicy::Reflect), 0.2);
        assert_eq!(row.pad_lookup(3, 0, PaddingPolicy::Reflect), 0.2);
        assert_eq!(row.pad_lookup(4, 0, PaddingPolicy::Reflect), 0.1);
        // in-bounds lookups are untouched by any policy
        for policy in [
            PaddingPolicy::Replicate,
            PaddingPolicy::Reflect,
            PaddingPolicy::Zero,
        ] {
            assert_eq!(row.pad_lookup(1, 0, policy), 0.2);
        }
    }

    #[test]
    fn reflect_on_single_pixel_image() {
        let one = img(1, 1, &[0.7]);
        assert_eq!(one.pad_lookup(-3, 5, PaddingPolicy::Reflect), 0.7);
        assert_eq!(one.pad_lookup(2, 0, PaddingPolicy::Replicate), 0.7);
    }

    #[test]
    fn convolve_identity_is_identity() {
        let im = img(3, 2, &[0.1, 0.5, 0.9, 0.2, 0.4, 0.8]);
        let out = im.convolve(&Kernel::identity(), PaddingPolicy::Zero);
        for (a, b) in im.pixels().iter().zip(out.pixels()) {
            assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn convolve_impulse_reproduces_kernel() {
        // out(cx + s, cy + t) = k(s, t) for a unit impulse at (cx, cy)
        let mut im = GrayImage::new(5, 5, 0.0f64).unwrap();
        im.set(2, 2, 1.0);
        let k = Kernel::new(1, 1, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]).unwrap();
        let out = im.convolve(&k, PaddingPolicy::Zero);
        for t in -1isize..=1 {
            for s in -1isize..=1 {
                let got = out.get((2 + s) as usize, (2 + t) as usize);
                assert!((got - k.weight(s, t)).abs() < 1e-15, "at ({s},{t})");
            }
        }
    }

    #[test]
    fn histogram_examples() {
        let c = GrayImage::new(16, 16, 0.5f64).unwrap();
        let h = c.histogram(256).unwrap();
        assert_eq!(h.counts()[128], 256);
        assert_eq!(h.total(), 256);

        let two = img(2, 1, &[0.0, 1.0]);
        let h = two.histogram(2).unwrap();
        assert_eq!(h.counts(), &[1, 1]);

        // ramp of 256 distinct levels k/255 into 256 bins
        let ramp = GrayImage::from_fn(256, 1, |x, _| x as f64 / 255.0).unwrap();
        let h = ramp.histogram(256).unwrap();
        assert!(h.counts().iter().all(|&c| c <= 2));
        assert_eq!(h.total(), 256);

        assert!(matches!(
            two.histogram(0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn box_kernel_weights_sum_to_one() {
        let k: Kernel<f64> = Kernel::box_mean(1, 1);
        assert!((k.weight_sum() - 1.0).abs() < 1e-12);
        assert_eq!(k.weights().len(), 9);
    }

    proptest! {
        #[test]
        fn histogram_counts_sum_to_pixel_count(
            px in proptest::collection::vec(0.0f64..=1.0, 1..64),
            bins in 1usize..40,
        ) {
            let w = px.len();
            let im = img(w, 1, &px);
            let h = im.histogram(bins).unwrap();
            prop_assert_eq!(h.total() as usize, w);
        }

        #[test]
        fn replicate_constant_image_is_constant(
            x in -20isize..20,
            y in -20isize..20,
        ) {
            let im = GrayImage::new(4, 3, 0.31f64).unwrap();
            prop_assert_eq!(im.pad_lookup(x, y, PaddingPolicy::Replicate), 0.31);
        }

        #[test]
        fn convolve_is_linear(
            a in proptest::collection::vec(0.0f64..1.0, 16),
            b in proptest::collection::vec(0.0f64..1.0, 16),
            ca in -2.0f64..2.0,
            cb in -2.0f64..2.0,
        ) {
            let fa = img(4, 4, &a);
            let fb = img(4, 4, &b);
            let k: Kernel<f64> = Kernel::box_mean(1, 1);
            let combo = GrayImage::from_fn(4, 4, |x, y| ca * fa.get(x, y) + cb * fb.get(x, y)).unwrap();
            let lhs = combo.convolve(&k, PaddingPolicy::Reflect);
            let ra = fa.convolve(&k, PaddingPolicy::Reflect);
            let rb = fb.convolve(&k, PaddingPolicy::Reflect);
            for i in 0..16 {
                let rhs = ca * ra.pixels()[i] + cb * rb.pixels()[i];
                prop_assert!((lhs.pixels()[i] - rhs).abs() < 1e-12);
            }
        }
    }
}
