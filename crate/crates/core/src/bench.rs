//! Benchmark harness: run the full filter x noise matrix on one image
//! and serialize the comparison table, histogram data and plot data.
//!
//! Everything emitted is a pure function of `(image, config, seed)`;
//! no timestamps, no environment. Cells may be evaluated in parallel,
//! and the keyed per-pixel RNG plus ordered collection keep the output
//! bytes identical to a serial run.

use crate::error::{Error, Result};
use crate::filter::FilterSpec;
use crate::image::{GrayImage, Histogram, PaddingPolicy};
use crate::metrics::{full_report, QualityReport, SsimParams};
use crate::noise::NoiseSpec;
use crate::pgm;
use crate::rng::{derive_seed, PixelStream};
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Which artifacts [`write_outputs`] produces.
#[derive(Clone, Copy, Debug)]
pub struct EmitFlags {
    pub table_csv: bool,
    pub table_md: bool,
    pub hist_csv: bool,
    pub plot_csv: bool,
    pub images: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        Self {
            table_csv: true,
            table_md: true,
            hist_csv: true,
            plot_csv: true,
            images: false,
        }
    }
}

/// Benchmark run description.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    /// Input PGM path; `None` runs on the built-in synthetic image.
    pub input: Option<PathBuf>,
    /// Side length of the synthetic image when no input is given.
    pub synthetic_size: usize,
    /// Master seed; per-noise sub-seeds derive from it and the label.
    pub seed: u64,
    pub noises: Vec<NoiseSpec>,
    pub filters: Vec<FilterSpec>,
    pub out_dir: PathBuf,
    pub emit: EmitFlags,
    /// Also score the unfiltered corrupted image per noise
    /// (filter label "none").
    pub baseline: bool,
    /// Evaluate the matrix cells on a thread pool. Output is
    /// byte-identical either way.
    pub parallel: bool,
}

impl BenchConfig {
    /// Defaults: synthetic 512x512 input, seed 42, the four noise
    /// models and four filters at their default parameters, baseline
    /// rows on.
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            input: None,
            synthetic_size: 512,
            seed: 42,
            noises: NoiseSpec::defaults(),
            filters: FilterSpec::defaults(),
            out_dir: out_dir.into(),
            emit: EmitFlags::default(),
            baseline: true,
            parallel: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.noises.is_empty() || self.filters.is_empty() {
            return Err(Error::Parameter(
                "benchmark needs at least one noise model and one filter".into(),
            ));
        }
        for spec in &self.noises {
            spec.validate()?;
        }
        for spec in &self.filters {
            spec.validate()?;
        }
        let mut labels: Vec<&str> = self.noises.iter().map(|n| n.label()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != self.noises.len() {
            return Err(Error::Parameter("duplicate noise labels".into()));
        }
        let mut labels: Vec<&str> = self.filters.iter().map(|f| f.label()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != self.filters.len() {
            return Err(Error::Parameter("duplicate filter labels".into()));
        }
        if self.input.is_none() && self.synthetic_size < 32 {
            return Err(Error::Parameter(
                "synthetic image side must be >= 32".into(),
            ));
        }
        Ok(())
    }
}

/// One scored table row.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub filter: String,
    pub noise: String,
    pub report: QualityReport<f64>,
}

/// Everything a benchmark run produces, before serialization.
#[derive(Clone, Debug)]
pub struct BenchResult {
    /// Baseline rows first (when enabled), then filter-major
    /// (filter, noise) rows in config order.
    pub rows: Vec<BenchRow>,
    /// 256-bin histograms: `original` plus one per corrupted image.
    pub histograms: Vec<(String, Histogram)>,
    /// Restored images, `<noise>_<filter>` keyed; filled only when
    /// `emit.images` is set.
    pub restored: Vec<(String, GrayImage<f64>)>,
    /// Deterministic run description (seed, parameters, checksum).
    pub provenance: String,
}

/// Deterministic synthetic test image: a diagonal ramp with a slow
/// vertical undulation, low-frequency waves, mid-frequency texture,
/// period-3 stripes and a handful of flat patches (rectangles and a
/// disk). Structure positions and phases derive from the seed.
pub fn synthetic_image(seed: u64, size: usize) -> GrayImage<f64> {
    assert!(size >= 32, "synthetic image side must be >= 32");
    let n = size;
    let scale = n as f64 / 512.0;
    let mut ps = PixelStream::new(derive_seed(seed, "synthetic"), 0);
    let tau = std::f64::consts::TAU;
    let u0 = ps.next_unit();
    let ph: Vec<f64> = (0..5).map(|_| tau * ps.next_unit()).collect();
    let jitter_span = ((8.0 * scale).round() as i64).max(1);
    let mut jitter = || (ps.next_u64() % (2 * jitter_span as u64 + 1)) as i64 - jitter_span;

    let rects: Vec<(i64, i64, usize, usize, f64)> = [
        (64, 96, 96, 128, 0.25),
        (320, 128, 120, 100, 0.75),
        (60, 330, 100, 110, 0.45),
        (330, 330, 110, 100, 0.62),
    ]
    .into_iter()
    .map(|(ry, rx, rh, rw, lvl): (usize, usize, usize, usize, f64)| {
        (
            (ry as f64 * scale) as i64 + jitter(),
            (rx as f64 * scale) as i64 + jitter(),
            ((rh as f64 * scale) as usize).max(2),
            ((rw as f64 * scale) as usize).max(2),
            lvl,
        )
    })
    .collect();
    let disk = (
        (440.0 * scale) as i64 + jitter(),
        (220.0 * scale) as i64 + jitter(),
        ((48.0 * scale) as i64).max(2),
    );

    let mut img = GrayImage::from_fn(n, n, |x, y| {
        let xf = x as f64 / (n - 1) as f64;
        let yf = y as f64 / (n - 1) as f64;
        let mut v = 0.35 + 0.30 * xf + 0.08 * (tau * (1.25 * yf + u0)).sin();
        v += 0.11 * (tau * x as f64 / 15.0 + ph[0]).sin() * (tau * y as f64 / 17.0 + ph[1]).sin();
        v += 0.035 * (tau * x as f64 / 7.3 + ph[2]).sin() * (tau * y as f64 / 9.1 + ph[3]).sin();
        v += 0.065 * (tau * x as f64 / 3.0 + ph[4]).sin();
        v
    })
    .expect("size checked above");

    for (ry, rx, rh, rw, lvl) in rects {
        for y in ry.max(0)..(ry + rh as i64).min(n as i64) {
            for x in rx.max(0)..(rx + rw as i64).min(n as i64) {
                img.set(x as usize, y as usize, lvl);
            }
        }
    }
    let (cy, cx, rad) = disk;
    for y in (cy - rad).max(0)..(cy + rad + 1).min(n as i64) {
        for x in (cx - rad).max(0)..(cx + rad + 1).min(n as i64) {
            if (y - cy) * (y - cy) + (x - cx) * (x - cx) <= rad * rad {
                img.set(x as usize, y as usize, 0.30);
            }
        }
    }
    img.clip()
}

/// Baseline row label.
pub const BASELINE_LABEL: &str = "none";

/// Run the whole matrix: corrupt once per noise model, restore with
/// every filter, score each restoration against the clean image.
pub fn run_matrix(config: &BenchConfig) -> Result<BenchResult> {
    config.validate()?;
    let (clean, input_desc, checksum) = match &config.input {
        Some(path) => {
            let bytes = std::fs::read(path)?;
            let img: GrayImage<f64> = pgm::load_pgm(&bytes)?;
            (
                img.clip(),
                path.display().to_string(),
                hex_sha256(&bytes),
            )
        }
        None => {
            let img = synthetic_image(config.seed, config.synthetic_size);
            let bytes = pgm::save_pgm(&img, true)?;
            (
                img,
                format!("synthetic({0}x{0})", config.synthetic_size),
                hex_sha256(&bytes),
            )
        }
    };

    // one corruption per noise model, shared by all filters
    let mut corrupted = Vec::with_capacity(config.noises.len());
    for spec in &config.noises {
        let sub_seed = derive_seed(config.seed, spec.label());
        corrupted.push(spec.apply(&clean, sub_seed)?);
    }

    let mut histograms = vec![("original".to_string(), clean.histogram(256)?)];
    for (spec, img) in config.noises.iter().zip(&corrupted) {
        histograms.push((spec.label().to_string(), img.histogram(256)?));
    }

    let params = SsimParams::default();
    let mut rows = Vec::new();
    if config.baseline {
        for (spec, img) in config.noises.iter().zip(&corrupted) {
            rows.push(BenchRow {
                filter: BASELINE_LABEL.to_string(),
                noise: spec.label().to_string(),
                report: full_report(&clean, img, 1.0, &params)?,
            });
        }
    }

    // the filter x noise cells are independent; evaluate them in
    // config order (filter-major) either serially or on a pool
    let cells: Vec<(usize, usize)> = (0..config.filters.len())
        .flat_map(|fi| (0..config.noises.len()).map(move |ni| (fi, ni)))
        .collect();
    let score_cell = |&(fi, ni): &(usize, usize)| -> Result<(BenchRow, Option<(String, GrayImage<f64>)>)> {
        let filter = &config.filters[fi];
        let noise = &config.noises[ni];
        let restored = filter.apply(&corrupted[ni], PaddingPolicy::Replicate)?;
        let report = full_report(&clean, &restored, 1.0, &params)?;
        let row = BenchRow {
            filter: filter.label().to_string(),
            noise: noise.label().to_string(),
            report,
        };
        let image = config
            .emit
            .images
            .then(|| (format!("{}_{}", noise.label(), filter.label()), restored));
        Ok((row, image))
    };
    let scored: Vec<_> = if config.parallel {
        cells.par_iter().map(score_cell).collect::<Result<_>>()?
    } else {
        cells.iter().map(score_cell).collect::<Result<_>>()?
    };
    let mut restored = Vec::new();
    for (row, image) in scored {
        rows.push(row);
        if let Some(kv) = image {
            restored.push(kv);
        }
    }

    let provenance = provenance_text(config, &input_desc, &checksum);
    Ok(BenchResult {
        rows,
        histograms,
        restored,
        provenance,
    })
}

fn hex_sha256(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn provenance_text(config: &BenchConfig, input_desc: &str, checksum: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("seed = {}\n", config.seed));
    out.push_str(&format!("input = {input_desc}\n"));
    out.push_str(&format!("input_sha256 = {checksum}\n"));
    out.push_str("padding = replicate\n");
    out.push_str("peak = 1\n");
    let p = SsimParams::default();
    out.push_str(&format!(
        "ssim: window = {0}x{0}, sigma = {1}, k1 = {2}, k2 = {3}, alpha = {4}, beta = {5}, gamma = {6}\n",
        p.window_side(),
        p.window_sigma,
        p.k1,
        p.k2,
        p.alpha,
        p.beta,
        p.gamma
    ));
    for spec in &config.noises {
        out.push_str(&format!("noise {}\n", spec.describe()));
    }
    for spec in &config.filters {
        out.push_str(&format!("filter {}\n", spec.describe()));
    }
    out.push_str(&format!("baseline = {}\n", config.baseline));
    out
}

/// Table serialization formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

/// 17-significant-digit serialization; infinite PSNR prints as `inf`.
pub fn format_metric(v: f64) -> String {
    if v.is_infinite() {
        (if v > 0.0 { "inf" } else { "-inf" }).to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Serialize the scored rows.
///
/// CSV: header `filter,noise,rmse,mse,uqi,psnr,ssim`, 17 significant
/// digits. Markdown: one table, rows grouped filter by filter in run
/// order, shortest-round-trip numbers.
pub fn emit_table(result: &BenchResult, format: TableFormat) -> Vec<u8> {
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str("filter,noise,rmse,mse,uqi,psnr,ssim\n");
            for row in &result.rows {
                let r = &row.report;
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    row.filter,
                    row.noise,
                    format_metric(r.rmse),
                    format_metric(r.mse),
                    format_metric(r.uqi),
                    format_metric(r.psnr),
                    format_metric(r.ssim)
                ));
            }
        }
        TableFormat::Markdown => {
            out.push_str("| Filter | Noise | RMSE | MSE | UQI | PSNR | SSIM |\n");
            out.push_str("|---|---|---|---|---|---|---|\n");
            for row in &result.rows {
                let r = &row.report;
                out.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {} | {} |\n",
                    row.filter, row.noise, r.rmse, r.mse, r.uqi, r.psnr, r.ssim
                ));
            }
        }
    }
    out.into_bytes()
}

/// One `bin,count` CSV per histogram: the original image and each
/// corrupted image.
pub fn emit_histograms(result: &BenchResult) -> Vec<(String, Vec<u8>)> {
    result
        .histograms
        .iter()
        .map(|(label, hist)| {
            let mut out = String::from("bin,count\n");
            for (bin, count) in hist.counts().iter().enumerate() {
                out.push_str(&format!("{bin},{count}\n"));
            }
            (format!("hist_{label}.csv"), out.into_bytes())
        })
        .collect()
}

/// Three long-format plot CSVs (`filter,noise,metric,value`) grouping
/// {rmse, mse}, {ssim, uqi} and {psnr}. Baseline rows are not plotted.
pub fn emit_plot_data(result: &BenchResult) -> Vec<(String, Vec<u8>)> {
    let groups: [(&str, Vec<(&str, fn(&QualityReport) -> f64)>); 3] = [
        (
            "plot_rmse_mse.csv",
            vec![("rmse", |r: &QualityReport| r.rmse), ("mse", |r: &QualityReport| r.mse)],
        ),
        (
            "plot_ssim_uqi.csv",
            vec![("ssim", |r: &QualityReport| r.ssim), ("uqi", |r: &QualityReport| r.uqi)],
        ),
        ("plot_psnr.csv", vec![("psnr", |r: &QualityReport| r.psnr)]),
    ];
    groups
        .into_iter()
        .map(|(name, metrics)| {
            let mut out = String::from("filter,noise,metric,value\n");
            for row in result.rows.iter().filter(|r| r.filter != BASELINE_LABEL) {
                for (metric, get) in &metrics {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        row.filter,
                        row.noise,
                        metric,
                        format_metric(get(&row.report))
                    ));
                }
            }
            (name.to_string(), out.into_bytes())
        })
        .collect()
}

/// Write every enabled artifact under `config.out_dir`; returns the
/// paths written, in a fixed order.
pub fn write_outputs(config: &BenchConfig, result: &BenchResult) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(&config.out_dir)?;
    let mut written = Vec::new();
    let write = |name: &str, bytes: &[u8]| -> Result<PathBuf> {
        let path = config.out_dir.join(name);
        std::fs::write(&path, bytes)?;
        Ok(path)
    };
    if config.emit.table_csv {
        written.push(write("table.csv", &emit_table(result, TableFormat::Csv))?);
    }
    if config.emit.table_md {
        written.push(write("table.md", &emit_table(result, TableFormat::Markdown))?);
    }
    if config.emit.hist_csv {
        for (name, bytes) in emit_histograms(result) {
            written.push(write(&name, &bytes)?);
        }
    }
    if config.emit.plot_csv {
        for (name, bytes) in emit_plot_data(result) {
            written.push(write(&name, &bytes)?);
        }
    }
    if config.emit.images {
        for (name, img) in &result.restored {
            let bytes = pgm::save_pgm(img, true)?;
            written.push(write(&format!("{name}.pgm"), &bytes)?);
        }
    }
    written.push(write("provenance.txt", result.provenance.as_bytes())?);
    Ok(written)
}

/// Run the matrix and write the outputs.
pub fn run(config: &BenchConfig) -> Result<(BenchResult, Vec<PathBuf>)> {
    let result = run_matrix(config)?;
    let written = write_outputs(config, &result)?;
    Ok((result, written))
}

/// Collect the written output tree as `(relative name, bytes)` pairs,
/// sorted by name. Test helper for byte-identity comparisons.
pub fn read_output_tree(dir: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let mut entries = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        if entry.file_type()?.is_file() {
            entries.push((
                entry.file_name().to_string_lossy().into_owned(),
                std::fs::read(entry.path())?,
            ));
        }
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(dir: &Path) -> BenchConfig {
        let mut config = BenchConfig::new(dir);
        config.synthetic_size = 64;
        config
    }

    #[test]
    fn synthetic_image_is_deterministic_and_clipped() {
        let a = synthetic_image(42, 64);
        let b = synthetic_image(42, 64);
        assert_eq!(a.pixels(), b.pixels());
        let c = synthetic_image(43, 64);
        assert_ne!(a.pixels(), c.pixels());
        assert!(a.pixels().iter().all(|&p| (0.0..=1.0).contains(&p)));
    }

    #[test]
    fn matrix_has_expected_row_counts() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config(dir.path());
        let result = run_matrix(&config).unwrap();
        // 4 baseline rows + 4 filters x 4 noises
        assert_eq!(result.rows.len(), 4 + 16);
        assert_eq!(result.histograms.len(), 5);
        assert!(result.restored.is_empty());
        for row in &result.rows {
            let r = &row.report;
            assert!((r.rmse * r.rmse - r.mse).abs() <= 1e-12 * r.mse.max(1e-300));
            let p = if r.mse == 0.0 {
                f64::INFINITY
            } else {
                10.0 * (1.0 / r.mse).log10()
            };
            assert!((r.psnr - p).abs() < 1e-9);
        }
    }

    #[test]
    fn histogram_counts_match_pixel_count() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config(dir.path());
        let result = run_matrix(&config).unwrap();
        for (label, hist) in &result.histograms {
            assert_eq!(hist.total(), 64 * 64, "{label}");
        }
    }

    #[test]
    fn salt_pepper_histogram_gains_extreme_mass() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = small_config(dir.path());
        config.synthetic_size = 128;
        let result = run_matrix(&config).unwrap();
        let get = |label: &str| {
            &result
                .histograms
                .iter()
                .find(|(l, _)| l == label)
                .unwrap()
                .1
        };
        let orig = get("original");
        let sp = get("salt_pepper");
        assert!(sp.counts()[0] > orig.counts()[0]);
        assert!(sp.counts()[255] > orig.counts()[255]);
    }

    #[test]
    fn csv_round_trips_and_md_counts_rows() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config(dir.path());
        let result = run_matrix(&config).unwrap();

        let csv = String::from_utf8(emit_table(&result, TableFormat::Csv)).unwrap();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines[0], "filter,noise,rmse,mse,uqi,psnr,ssim");
        assert_eq!(lines.len(), 1 + 20);
        for (line, row) in lines[1..].iter().zip(&result.rows) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 7);
            let parsed: Vec<f64> = fields[2..].iter().map(|f| f.parse().unwrap()).collect();
            assert_eq!(parsed[0], row.report.rmse);
            assert_eq!(parsed[1], row.report.mse);
            assert_eq!(parsed[2], row.report.uqi);
            assert_eq!(parsed[3], row.report.psnr);
            assert_eq!(parsed[4], row.report.ssim);
        }

        let md = String::from_utf8(emit_table(&result, TableFormat::Markdown)).unwrap();
        // 1 header + 1 separator + 16 data rows + 4 baseline rows
        assert_eq!(md.trim_end().lines().count(), 2 + 20);
    }

    #[test]
    fn plot_files_have_expected_row_counts() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config(dir.path());
        let result = run_matrix(&config).unwrap();
        let plots = emit_plot_data(&result);
        let rows = |bytes: &[u8]| String::from_utf8_lossy(bytes).trim_end().lines().count() - 1;
        assert_eq!(plots[0].0, "plot_rmse_mse.csv");
        assert_eq!(rows(&plots[0].1), 32);
        assert_eq!(rows(&plots[1].1), 32);
        assert_eq!(plots[2].0, "plot_psnr.csv");
        assert_eq!(rows(&plots[2].1), 16);
        // plot values come from the same reports as the table
        let csv = String::from_utf8(emit_table(&result, TableFormat::Csv)).unwrap();
        let psnr_plot = String::from_utf8(plots[2].1.clone()).unwrap();
        for line in psnr_plot.lines().skip(1) {
            let value = line.rsplit(',').next().unwrap();
            assert!(csv.contains(value), "{value} missing from table");
        }
    }

    #[test]
    fn output_tree_is_deterministic() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let mut config_a = small_config(dir_a.path());
        config_a.emit.images = true;
        let mut config_b = config_a.clone();
        config_b.out_dir = dir_b.path().into();
        config_b.parallel = false; // serial must match parallel

        run(&config_a).unwrap();
        run(&config_b).unwrap();
        let tree_a = read_output_tree(dir_a.path()).unwrap();
        let tree_b = read_output_tree(dir_b.path()).unwrap();
        assert_eq!(tree_a.len(), tree_b.len());
        for ((name_a, bytes_a), (name_b, bytes_b)) in tree_a.iter().zip(&tree_b) {
            assert_eq!(name_a, name_b);
            assert_eq!(bytes_a, bytes_b, "{name_a} differs");
        }
        // images requested: 16 restored PGMs present
        assert_eq!(tree_a.iter().filter(|(n, _)| n.ends_with(".pgm")).count(), 16);
    }

    #[test]
    fn rejects_empty_and_duplicate_specs() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = small_config(dir.path());
        config.filters.clear();
        assert!(run_matrix(&config).is_err());

        let mut config = small_config(dir.path());
        config.noises.push(NoiseSpec::Gaussian {
            mean: 0.0,
            sigma: 0.2,
        });
        assert!(run_matrix(&config).is_err());
    }

    #[test]
    fn format_metric_prints_inf_and_17_digits() {
        assert_eq!(format_metric(f64::INFINITY), "inf");
        let s = format_metric(0.059_831_192_825_080_35);
        assert_eq!(s.parse::<f64>().unwrap(), 0.059_831_192_825_080_35);
    }
}
