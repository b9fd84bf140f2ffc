//! Independent reference implementations used as test oracles.
//!
//! Everything here is written as plain double loops over window
//! pixels, deliberately sharing no code with the library paths it
//! checks.

use spatial_restore::rng::PixelStream;
use spatial_restore::{GrayImage, PaddingPolicy};

pub fn random_image(seed: u64, width: usize, height: usize) -> GrayImage<f64> {
    let mut i = 0u64;
    GrayImage::from_fn(width, height, |_, _| {
        let v = PixelStream::new(seed, i).next_unit();
        i += 1;
        v
    })
    .unwrap()
}

fn pad(img: &GrayImage<f64>, x: isize, y: isize, policy: PaddingPolicy) -> f64 {
    // independent border arithmetic
    let resolve = |i: isize, n: isize| -> Option<isize> {
        if i >= 0 && i < n {
            return Some(i);
        }
        match policy {
            PaddingPolicy::Zero => None,
            PaddingPolicy::Replicate => Some(i.max(0).min(n - 1)),
            PaddingPolicy::Reflect => {
                if n == 1 {
                    return Some(0);
                }
                let mut i = i;
                loop {
                    if i < 0 {
                        i = -i;
                    } else if i >= n {
                        i = 2 * (n - 1) - i;
                    } else {
                        return Some(i);
                    }
                }
            }
        }
    };
    match (
        resolve(x, img.width() as isize),
        resolve(y, img.height() as isize),
    ) {
        (Some(xi), Some(yi)) => img.get(xi as usize, yi as usize),
        _ => 0.0,
    }
}

pub fn naive_mean(
    img: &GrayImage<f64>,
    m: usize,
    n: usize,
    policy: PaddingPolicy,
) -> GrayImage<f64> {
    let (ry, rx) = ((m / 2) as isize, (n / 2) as isize);
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let mut sum = 0.0;
        for t in -ry..=ry {
            for s in -rx..=rx {
                sum += pad(img, x as isize + s, y as isize + t, policy);
            }
        }
        sum / (m * n) as f64
    })
    .unwrap()
}

pub fn naive_median(
    img: &GrayImage<f64>,
    m: usize,
    n: usize,
    policy: PaddingPolicy,
) -> GrayImage<f64> {
    let (ry, rx) = ((m / 2) as isize, (n / 2) as isize);
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let mut vals = Vec::with_capacity(m * n);
        for t in -ry..=ry {
            for s in -rx..=rx {
                vals.push(pad(img, x as isize + s, y as isize + t, policy));
            }
        }
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals[vals.len() / 2]
    })
    .unwrap()
}

pub fn naive_gaussian(
    img: &GrayImage<f64>,
    sigma: f64,
    radius: usize,
    policy: PaddingPolicy,
) -> GrayImage<f64> {
    let r = radius as isize;
    let mut weights = Vec::new();
    let mut total = 0.0;
    for t in -r..=r {
        for s in -r..=r {
            let w = (-((s * s + t * t) as f64) / (2.0 * sigma * sigma)).exp();
            weights.push(w);
            total += w;
        }
    }
    for w in &mut weights {
        *w /= total;
    }
    let side = (2 * radius + 1) as isize;
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let mut acc = 0.0;
        for t in -r..=r {
            for s in -r..=r {
                let w = weights[((t + r) * side + (s + r)) as usize];
                // kernel is centrosymmetric, so convolution equals
                // correlation; keep the convolution orientation anyway
                acc += w * pad(img, x as isize - s, y as isize - t, policy);
            }
        }
        acc
    })
    .unwrap()
}

pub fn naive_bilateral(
    img: &GrayImage<f64>,
    sigma_s: f64,
    sigma_r: f64,
    radius: usize,
    policy: PaddingPolicy,
) -> GrayImage<f64> {
    let r = radius as isize;
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let center = img.get(x, y);
        let mut num = 0.0;
        let mut den = 0.0;
        for t in -r..=r {
            for s in -r..=r {
                let q = pad(img, x as isize + s, y as isize + t, policy);
                let gs = (-((s * s + t * t) as f64) / (2.0 * sigma_s * sigma_s)).exp();
                let gr = (-((center - q) * (center - q)) / (2.0 * sigma_r * sigma_r)).exp();
                num += gs * gr * q;
                den += gs * gr;
            }
        }
        num / den
    })
    .unwrap()
}

/// Direct sliding-window SSIM with subtract-the-mean moments, an
/// algebraically different route than the library's separable pass.
pub fn naive_ssim(f: &GrayImage<f64>, g: &GrayImage<f64>, radius: usize, sigma: f64) -> f64 {
    let side = 2 * radius + 1;
    let mut weights = Vec::with_capacity(side * side);
    let mut total = 0.0;
    let r = radius as isize;
    for t in -r..=r {
        for s in -r..=r {
            let w = (-((s * s + t * t) as f64) / (2.0 * sigma * sigma)).exp();
            weights.push(w);
            total += w;
        }
    }
    for w in &mut weights {
        *w /= total;
    }
    let (c1, c2) = (0.01f64 * 0.01, 0.03f64 * 0.03);
    let c3 = c2 / 2.0;
    let (w, h) = f.dimensions();
    let mut sum = 0.0;
    let mut count = 0usize;
    for cy in radius..h - radius {
        for cx in radius..w - radius {
            let mut mf = 0.0;
            let mut mg = 0.0;
            for t in -r..=r {
                for s in -r..=r {
                    let wgt = weights[((t + r) * side as isize + (s + r)) as usize];
                    mf += wgt * f.get((cx as isize + s) as usize, (cy as isize + t) as usize);
                    mg += wgt * g.get((cx as isize + s) as usize, (cy as isize + t) as usize);
                }
            }
            let (mut vf, mut vg, mut cov) = (0.0, 0.0, 0.0);
            for t in -r..=r {
                for s in -r..=r {
                    let wgt = weights[((t + r) * side as isize + (s + r)) as usize];
                    let df = f.get((cx as isize + s) as usize, (cy as isize + t) as usize) - mf;
                    let dg = g.get((cx as isize + s) as usize, (cy as isize + t) as usize) - mg;
                    vf += wgt * df * df;
                    vg += wgt * dg * dg;
                    cov += wgt * df * dg;
                }
            }
            let l = (2.0 * mf * mg + c1) / (mf * mf + mg * mg + c1);
            let c = (2.0 * vf.sqrt() * vg.sqrt() + c2) / (vf + vg + c2);
            let s_term = (cov + c3) / (vf.sqrt() * vg.sqrt() + c3);
            sum += l * c * s_term;
            count += 1;
        }
    }
    sum / count as f64
}
