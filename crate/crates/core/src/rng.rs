//! Deterministic counter-based random number generation.
//!
//! Every noise sampler draws from a [`PixelStream`] keyed by
//! `(seed, pixel index)`. A stream is a SplitMix64 generator: the state
//! advances by the golden-ratio increment and each output is the
//! SplitMix64 finalizer of the state. Because a pixel's stream depends
//! only on the key, results are bit-identical regardless of traversal
//! or parallelization order, across platforms and thread counts.
//!
//! Not cryptographically secure; never use for secrets.

use crate::numeric::ln_gamma;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: the 64-bit avalanche mix.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a sub-seed from a master seed and a text label.
///
/// Used by the benchmark harness so each noise model owns an
/// independent stream family; adding a model never perturbs the
/// others. FNV-1a over the label, then mixed with the seed.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in label.as_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01B3);
    }
    mix64(seed ^ mix64(h))
}

/// One deterministic random stream, keyed by `(seed, index)`.
#[derive(Clone, Debug)]
pub struct PixelStream {
    state: u64,
}

impl PixelStream {
    /// Open the stream for key `(seed, index)`.
    pub fn new(seed: u64, index: u64) -> Self {
        let state = mix64(mix64(seed).wrapping_add(index.wrapping_mul(GOLDEN_GAMMA)));
        Self { state }
    }

    /// Next raw 64-bit value.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 significant bits.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform in `(0, 1]`; safe as a logarithm argument.
    #[inline]
    pub fn next_open_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Normal variate via the Box–Muller transform (cosine branch).
    pub fn next_normal(&mut self, mean: f64, sigma: f64) -> f64 {
        let u1 = self.next_open_unit();
        let u2 = self.next_unit();
        let r = (-2.0 * u1.ln()).sqrt();
        mean + sigma * r * (std::f64::consts::TAU * u2).cos()
    }

    /// Poisson variate with rate `lambda >= 0`.
    ///
    /// Inversion by sequential search for `lambda <= 30`, Hörmann's
    /// transformed-rejection method (PTRS) above. The number of
    /// uniforms consumed varies per draw, which is fine because each
    /// pixel owns its stream.
    pub fn next_poisson(&mut self, lambda: f64) -> u64 {
        debug_assert!(lambda >= 0.0 && lambda.is_finite());
        if lambda <= 0.0 {
            0
        } else if lambda <= 30.0 {
            self.poisson_inversion(lambda)
        } else {
            self.poisson_ptrs(lambda)
        }
    }

    fn poisson_inversion(&mut self, lambda: f64) -> u64 {
        let u = self.next_unit();
        let mut p = (-lambda).exp();
        let mut cdf = p;
        let mut k = 0u64;
        // cap guards against fp saturation of the cdf; unreachable in
        // practice for lambda <= 30
        while u >= cdf && k < 1000 {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
        }
        k
    }

    fn poisson_ptrs(&mut self, lambda: f64) -> u64 {
        let slam = lambda.sqrt();
        let loglam = lambda.ln();
        let b = 0.931 + 2.53 * slam;
        let a = -0.059 + 0.02483 * b;
        let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        let v_r = 0.9277 - 3.6224 / (b - 2.0);
        loop {
            let u = self.next_unit() - 0.5;
            let v = self.next_unit();
            let us = 0.5 - u.abs();
            let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
            if us >= 0.07 && v <= v_r {
                return k as u64;
            }
            if k < 0.0 || (us < 0.013 && v > us) {
                continue;
            }
            if (v * inv_alpha / (a / (us * us) + b)).ln()
                <= k * loglam - lambda - ln_gamma(k + 1.0)
            {
                return k as u64;
            }
        }
    }
}
