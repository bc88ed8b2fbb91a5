//! Experiment drivers: rank/block-size sweeps, QSVD timing and
//! corpus-level training with held-out evaluation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use crate::autoencoder::{extract_pairs, train, PairModel, TrainConfig, TrainOutcome};
use crate::codec::{decompress, CodecParams, FactorizedImage, BLOCK_SIZES};
use crate::error::{Error, Result};
use crate::image::RgbImage;
use crate::imageio::{load_image, CorpusManifest, Split};
use crate::metrics::{QualityReport, ReportRow};
use crate::representation::{from_full_quaternion, to_full_quaternion, Mode};

/// Truncation ranks, either literal or as fractions `num/den` of the block size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankSpec {
    Explicit(Vec<usize>),
    Fractions(Vec<(usize, usize)>),
}

impl Default for RankSpec {
    fn default() -> Self {
        RankSpec::Fractions(vec![(1, 16), (1, 8), (1, 4), (1, 2)])
    }
}

impl RankSpec {
    /// Sorted, de-duplicated ranks for block size `n`.
    pub fn ranks_for(&self, n: usize) -> Vec<usize> {
        let mut ts: Vec<usize> = match self {
            RankSpec::Explicit(ts) => ts.clone(),
            RankSpec::Fractions(fs) => fs.iter().map(|&(num, den)| (n * num / den).max(1)).collect(),
        };
        ts.sort_unstable();
        ts.dedup();
        ts
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub modes: Vec<Mode>,
    pub block_sizes: Vec<usize>,
    pub ranks: RankSpec,
    /// QSVD timing repetitions; the median is reported.
    pub reps: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            modes: vec![Mode::Full, Mode::Pure],
            block_sizes: BLOCK_SIZES.to_vec(),
            ranks: RankSpec::default(),
            reps: 1,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.modes.is_empty() || self.block_sizes.is_empty() {
            return Err(Error::InvalidParam("sweep needs at least one mode and block size".into()));
        }
        if self.reps == 0 {
            return Err(Error::InvalidParam("repetitions must be positive".into()));
        }
        if let RankSpec::Fractions(fs) = &self.ranks {
            if fs.is_empty() || fs.iter().any(|&(num, den)| num == 0 || den == 0 || num > den) {
                return Err(Error::InvalidParam(format!("rank fractions {fs:?} must lie in (0, 1]")));
            }
        }
        for &n in &self.block_sizes {
            let ts = self.ranks.ranks_for(n);
            if ts.is_empty() {
                return Err(Error::InvalidParam("no ranks given".into()));
            }
            for t in ts {
                CodecParams::new(n, t, Mode::Pure)?;
            }
        }
        Ok(())
    }
}

/// A (image, mode, n) combination, or a single rank within it, that could not be evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepFailure {
    pub image: String,
    pub mode: Mode,
    pub n: usize,
    pub t: Option<usize>,
    pub message: String,
}

#[derive(Clone, Debug, Default)]
pub struct SweepOutcome {
    pub rows: Vec<ReportRow>,
    pub failures: Vec<SweepFailure>,
}

pub fn median(xs: &mut [f64]) -> f64 {
    assert!(!xs.is_empty(), "median of nothing");
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        0.5 * (xs[mid - 1] + xs[mid])
    }
}

/// Factorizes `reps` times sequentially and keeps the median QSVD time.
fn factorize_timed(img: &RgbImage, model: Option<&PairModel>, n: usize, mode: Mode, reps: usize) -> Result<FactorizedImage> {
    let mut first = FactorizedImage::new(img, model, n, mode, false)?;
    let mut times = vec![first.qsvd_seconds];
    for _ in 1..reps {
        times.push(FactorizedImage::new(img, model, n, mode, false)?.qsvd_seconds);
    }
    first.qsvd_seconds = median(&mut times);
    Ok(first)
}

/// One row per (image, mode, n, t). Failures are collected and the sweep carries on.
pub fn run_sweep(images: &[(String, RgbImage)], model: Option<&PairModel>, spec: &SweepSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    if images.is_empty() {
        return Err(Error::InvalidParam("sweep corpus is empty".into()));
    }
    let mut out = SweepOutcome::default();
    for (id, img) in images {
        for &mode in &spec.modes {
            for &n in &spec.block_sizes {
                let fail = |t: Option<usize>, e: Error| SweepFailure {
                    image: id.clone(),
                    mode,
                    n,
                    t,
                    message: e.to_string(),
                };
                let fact = match factorize_timed(img, model, n, mode, spec.reps) {
                    Ok(f) => f,
                    Err(e) => {
                        out.failures.push(fail(None, e));
                        continue;
                    }
                };
                for t in spec.ranks.ranks_for(n) {
                    let row = fact.encode(t).and_then(|c| {
                        let decoded = decompress(&c, model)?;
                        let report = QualityReport::with_size(img, &decoded, c.byte_len())?;
                        Ok(ReportRow::new(id.clone(), mode, n, t, &report, c.byte_len(), fact.qsvd_seconds))
                    });
                    match row {
                        Ok(r) => out.rows.push(r),
                        Err(e) => out.failures.push(fail(Some(t), e)),
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Means over all images for one (mode, n, t).
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub mode: Mode,
    pub n: usize,
    pub t: usize,
    pub images: usize,
    pub mse: [f64; 3],
    pub psnr_db: f64,
    pub ssim: f64,
    pub cr: f64,
    pub container_bytes: f64,
    pub qsvd_seconds: f64,
}

pub fn summarize(rows: &[ReportRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(Mode, usize, usize), Vec<&ReportRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.mode, r.n, r.t)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((mode, n, t), rs)| {
            let k = rs.len() as f64;
            let mean = |f: fn(&ReportRow) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / k;
            SummaryRow {
                mode,
                n,
                t,
                images: rs.len(),
                mse: [mean(|r| r.mse_r), mean(|r| r.mse_g), mean(|r| r.mse_b)],
                psnr_db: mean(|r| r.psnr_db),
                ssim: mean(|r| r.ssim),
                cr: mean(|r| r.cr),
                container_bytes: mean(|r| r.container_bytes as f64),
                qsvd_seconds: mean(|r| r.qsvd_seconds),
            }
        })
        .collect()
}

pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut s = String::from("mode   n    t    imgs  psnr_db   ssim     cr      bytes      mse_r     mse_g     mse_b     qsvd_s\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{:<6} {:<4} {:<4} {:<5} {:<9.4} {:<8.5} {:<7.3} {:<10.0} {:<9.3} {:<9.3} {:<9.3} {:.4}",
            r.mode, r.n, r.t, r.images, r.psnr_db, r.ssim, r.cr, r.container_bytes, r.mse[0], r.mse[1], r.mse[2], r.qsvd_seconds
        );
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimingTable {
    /// `(n, median QSVD seconds)` in the order requested.
    pub entries: Vec<(usize, f64)>,
}

impl TimingTable {
    pub fn argmin(&self) -> usize {
        self.entries
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|e| e.0)
            .expect("timing table is never empty")
    }
}

/// Median QSVD-only wall time of the whole image at each block size, run sequentially.
pub fn time_block_sizes(img: &RgbImage, model: Option<&PairModel>, mode: Mode, sizes: &[usize], reps: usize) -> Result<TimingTable> {
    if sizes.is_empty() || reps == 0 {
        return Err(Error::InvalidParam("timing needs block sizes and a positive repetition count".into()));
    }
    let mut entries = Vec::with_capacity(sizes.len());
    for &n in sizes {
        entries.push((n, factorize_timed(img, model, n, mode, reps)?.qsvd_seconds));
    }
    Ok(TimingTable { entries })
}

#[derive(Clone, Debug)]
pub struct HeldOutReport {
    pub per_image: Vec<(String, QualityReport)>,
    /// Means of the per-image values.
    pub mean: QualityReport,
}

/// Straight encode/decode through the model, no truncation.
pub fn round_trip(img: &RgbImage, model: &PairModel) -> Result<RgbImage> {
    let (q, meta) = to_full_quaternion(img, model);
    from_full_quaternion(&q, &meta, model)
}

pub fn evaluate_model(model: &PairModel, images: &[(String, RgbImage)]) -> Result<HeldOutReport> {
    if images.is_empty() {
        return Err(Error::InsufficientData("no images to evaluate on".into()));
    }
    let mut per_image = Vec::with_capacity(images.len());
    for (id, img) in images {
        per_image.push((id.clone(), QualityReport::compare(img, &round_trip(img, model)?)?));
    }
    let k = per_image.len() as f64;
    let mean_of = |f: &dyn Fn(&QualityReport) -> f64| per_image.iter().map(|(_, r)| f(r)).sum::<f64>() / k;
    let mean = QualityReport {
        mse: [mean_of(&|r| r.mse[0]), mean_of(&|r| r.mse[1]), mean_of(&|r| r.mse[2])],
        psnr_db: mean_of(&|r| r.psnr_db),
        ssim: mean_of(&|r| r.ssim),
        cr: None,
    };
    Ok(HeldOutReport { per_image, mean })
}

pub fn load_labeled<'a>(paths: impl IntoIterator<Item = &'a Path>) -> Result<Vec<(String, RgbImage)>> {
    paths
        .into_iter()
        .map(|p| Ok((p.display().to_string(), load_image(p)?)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct CorpusTraining {
    pub outcome: TrainOutcome,
    pub held_out: HeldOutReport,
}

/// Trains on the manifest's train split and evaluates on its test split.
pub fn train_from_manifest(manifest: &CorpusManifest, cfg: &TrainConfig) -> Result<CorpusTraining> {
    let train_imgs: Vec<RgbImage> = load_labeled(manifest.paths(Split::Train))?.into_iter().map(|(_, i)| i).collect();
    let test_imgs = load_labeled(manifest.paths(Split::Test))?;
    let samples = extract_pairs(&train_imgs, cfg)?;
    let outcome = train(&samples, cfg)?;
    let held_out = evaluate_model(&outcome.model, &test_imgs)?;
    Ok(CorpusTraining { outcome, held_out })
}

/// `epoch,loss` lines.
pub fn training_log(loss_history: &[f64]) -> String {
    let mut s = String::from("epoch,loss\n");
    for (i, l) in loss_history.iter().enumerate() {
        let _ = writeln!(s, "{},{l:e}", i + 1);
    }
    s
}

/// Wall-clock seconds of `f`.
pub fn timed<R>(f: impl FnOnce() -> R) -> (R, f64) {
    let start = Instant::now();
    let r = f();
    (r, start.elapsed().as_secs_f64())
}
