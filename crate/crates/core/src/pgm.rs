//! PGM (netpbm grayscale) reading and writing.
//!
//! Accepts P2 (ASCII) and P5 (binary) with `maxval <= 255`; `#`
//! comments are tolerated between header tokens. Stored value `v` maps
//! to intensity `v / maxval`.
//!
//! Saving always writes `maxval = 255` and quantizes with
//! round-half-away-from-zero on `p * 255`, so output bytes are
//! deterministic across platforms.

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::numeric::scalar;
use crate::Intensity;
use std::path::Path;

struct Tokenizer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokenizer<'a> {
    fn new(bytes: &'a [u8], pos: usize) -> Self {
        Self { bytes, pos }
    }

    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn next_uint(&mut self, what: &str) -> Result<(usize, u32)> {
        self.skip_space_and_comments();
        let start = self.pos;
        if self.pos >= self.bytes.len() {
            return Err(Error::pgm(self.pos, format!("unexpected end of data, expected {what}")));
        }
        let mut value: u64 = 0;
        let mut digits = 0;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            value = value * 10 + (self.bytes[self.pos] - b'0') as u64;
            if value > u32::MAX as u64 {
                return Err(Error::pgm(start, format!("{what} out of range")));
            }
            self.pos += 1;
            digits += 1;
        }
        if digits == 0 {
            return Err(Error::pgm(
                self.pos,
                format!("expected {what}, found byte {:#04x}", self.bytes[self.pos]),
            ));
        }
        Ok((start, value as u32))
    }
}

/// Parse PGM bytes into an image with intensities `v / maxval`.
pub fn load_pgm<T: Intensity>(bytes: &[u8]) -> Result<GrayImage<T>> {
    if bytes.len() < 2 {
        return Err(Error::pgm(0, "data too short for a PGM magic number"));
    }
    let binary = match &bytes[..2] {
        b"P5" => true,
        b"P2" => false,
        other => {
            return Err(Error::pgm(
                0,
                format!(
                    "unsupported magic {:?}, expected P2 or P5",
                    String::from_utf8_lossy(other)
                ),
            ))
        }
    };
    let mut tok = Tokenizer::new(bytes, 2);
    let (woff, width) = tok.next_uint("width")?;
    let (hoff, height) = tok.next_uint("height")?;
    if width == 0 {
        return Err(Error::pgm(woff, "width must be >= 1"));
    }
    if height == 0 {
        return Err(Error::pgm(hoff, "height must be >= 1"));
    }
    let (moff, maxval) = tok.next_uint("maxval")?;
    if !(1..=255).contains(&maxval) {
        return Err(Error::pgm(moff, format!("maxval {maxval} outside [1, 255]")));
    }

    let (width, height) = (width as usize, height as usize);
    let count = width * height;
    // v / maxval computed once per sample value, so load(save(img))
    // equals round(p * 255) / 255 bit-exactly
    let table: Vec<T> = (0..=maxval)
        .map(|v| scalar::<T>(v as f64 / maxval as f64))
        .collect();
    let mut pixels = Vec::with_capacity(count);

    if binary {
        // exactly one whitespace byte separates maxval from the payload
        if tok.pos >= bytes.len() || !bytes[tok.pos].is_ascii_whitespace() {
            return Err(Error::pgm(tok.pos, "expected whitespace before binary payload"));
        }
        let data_start = tok.pos + 1;
        if bytes.len() < data_start + count {
            return Err(Error::pgm(
                bytes.len(),
                format!(
                    "truncated payload: need {count} bytes, found {}",
                    bytes.len().saturating_sub(data_start)
                ),
            ));
        }
        for (i, &b) in bytes[data_start..data_start + count].iter().enumerate() {
            if b as u32 > maxval {
                return Err(Error::pgm(
                    data_start + i,
                    format!("sample {b} exceeds maxval {maxval}"),
                ));
            }
            pixels.push(table[b as usize]);
        }
    } else {
        for _ in 0..count {
            let (off, v) = tok.next_uint("pixel sample")?;
            if v > maxval {
                return Err(Error::pgm(off, format!("sample {v} exceeds maxval {maxval}")));
            }
            pixels.push(table[v as usize]);
        }
    }
    GrayImage::from_pixels(width, height, pixels)
}

/// Serialize to PGM bytes; binary P5 or ASCII P2.
///
/// Pixels must already be inside `[0, 1]` (clip first); out-of-range
/// values are a [`Error::Range`] so quantization stays well defined.
pub fn save_pgm<T: Intensity>(img: &GrayImage<T>, binary: bool) -> Result<Vec<u8>> {
    let quantized = quantize(img)?;
    let mut out = Vec::with_capacity(quantized.len() + 32);
    let magic = if binary { "P5" } else { "P2" };
    out.extend_from_slice(format!("{magic}\n{} {}\n255\n", img.width(), img.height()).as_bytes());
    if binary {
        out.extend_from_slice(&quantized);
    } else {
        for row in quantized.chunks(img.width()) {
            let line = row
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            out.extend_from_slice(line.as_bytes());
            out.push(b'\n');
        }
    }
    Ok(out)
}

/// Quantize intensities to `u8` with round-half-away-from-zero.
fn quantize<T: Intensity>(img: &GrayImage<T>) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(img.pixels().len());
    let max = scalar::<T>(255.0);
    for (i, &p) in img.pixels().iter().enumerate() {
        if p < T::zero() || p > T::one() || !p.is_finite() {
            return Err(Error::Range(format!(
                "pixel {i} = {p} outside [0, 1]; clip before saving"
            )));
        }
        // Float::round is round-half-away-from-zero
        let v = (p * max).round().to_f64().unwrap_or(0.0) as u8;
        out.push(v);
    }
    Ok(out)
}

/// Read and parse a PGM file.
pub fn load_pgm_file<T: Intensity>(path: impl AsRef<Path>) -> Result<GrayImage<T>> {
    let bytes = std::fs::read(path)?;
    load_pgm(&bytes)
}

/// Write an image as a PGM file.
pub fn save_pgm_file<T: Intensity>(
    img: &GrayImage<T>,
    path: impl AsRef<Path>,
    binary: bool,
) -> Result<()> {
    let bytes = save_pgm(img, binary)?;
    std::fs::write(path, bytes)?;
    Ok(())
}
