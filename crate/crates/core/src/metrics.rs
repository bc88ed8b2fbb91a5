//! Quality and size measures.
//!
//! * MSE per color channel.
//! * PSNR on the MSE pooled over all `3·N·W` subpixels, with peak 255.
//! * SSIM as a single global statistic on BT.601 luma
//!   (`0.299 R + 0.587 G + 0.114 B`), population variances, `K1 = 0.01`,
//!   `K2 = 0.03`, `L = 255`.
//! * Compression ratio against the raw 24-bit size.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::RgbImage;
use crate::representation::Mode;

pub const PEAK: f64 = 255.0;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

fn same_dims(a: &RgbImage, b: &RgbImage) -> Result<()> {
    if (a.height(), a.width()) != (b.height(), b.width()) {
        return Err(Error::Shape(format!(
            "comparing {}x{} with {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    Ok(())
}

/// Mean squared difference of two equally sized channel planes.
pub fn mse_channel(a: &[u8], b: &[u8]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Shape(format!("channel lengths {} and {}", a.len(), b.len())));
    }
    let sse: f64 = a.iter().zip(b).map(|(&x, &y)| (x as f64 - y as f64).powi(2)).sum();
    Ok(sse / a.len() as f64)
}

/// `[R, G, B]` channel MSEs.
pub fn mse_per_channel(a: &RgbImage, b: &RgbImage) -> Result<[f64; 3]> {
    same_dims(a, b)?;
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        *o = mse_channel(&a.channel(k), &b.channel(k))?;
    }
    Ok(out)
}

pub fn pooled_mse(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    same_dims(a, b)?;
    mse_channel(a.samples(), b.samples())
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK * PEAK / mse).log10()
    }
}

/// `+inf` for identical images.
pub fn psnr(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    Ok(psnr_from_mse(pooled_mse(a, b)?))
}

pub fn luma(img: &RgbImage) -> Vec<f64> {
    img.samples()
        .chunks_exact(3)
        .map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64)
        .collect()
}

pub fn ssim(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    same_dims(a, b)?;
    let (x, y) = (luma(a), luma(b));
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut vx, mut vy, mut cov) = (0.0, 0.0, 0.0);
    for (&p, &q) in x.iter().zip(&y) {
        let (dx, dy) = (p - mx, q - my);
        vx += dx * dx;
        vy += dy * dy;
        cov += dx * dy;
    }
    let (vx, vy, cov) = (vx / n, vy / n, cov / n);
    let c1 = (SSIM_K1 * PEAK).powi(2);
    let c2 = (SSIM_K2 * PEAK).powi(2);
    Ok((2.0 * mx * my + c1) * (2.0 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2)))
}

pub fn compression_ratio(uncompressed: usize, compressed: usize) -> Result<f64> {
    if compressed == 0 {
        return Err(Error::InvalidParam("compressed size is zero".into()));
    }
    Ok(uncompressed as f64 / compressed as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QualityReport {
    pub mse: [f64; 3],
    pub psnr_db: f64,
    pub ssim: f64,
    pub cr: Option<f64>,
}

impl QualityReport {
    pub fn compare(original: &RgbImage, decoded: &RgbImage) -> Result<Self> {
        Ok(Self {
            mse: mse_per_channel(original, decoded)?,
            psnr_db: psnr(original, decoded)?,
            ssim: ssim(original, decoded)?,
            cr: None,
        })
    }

    /// As [`compare`](Self::compare), with the ratio of the raw size to `container_bytes`.
    pub fn with_size(original: &RgbImage, decoded: &RgbImage, container_bytes: usize) -> Result<Self> {
        Ok(Self {
            cr: Some(compression_ratio(original.raw_size(), container_bytes)?),
            ..Self::compare(original, decoded)?
        })
    }
}

impl std::fmt::Display for QualityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "MSE R/G/B {:.4} / {:.4} / {:.4}  PSNR {:.4} dB  SSIM {:.4}",
            self.mse[0], self.mse[1], self.mse[2], self.psnr_db, self.ssim
        )?;
        if let Some(cr) = self.cr {
            write!(f, "  CR {cr:.3}")?;
        }
        Ok(())
    }
}

/// One line of sweep output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub image: String,
    pub mode: Mode,
    pub n: usize,
    pub t: usize,
    pub mse_r: f64,
    pub mse_g: f64,
    pub mse_b: f64,
    pub psnr_db: f64,
    pub ssim: f64,
    pub cr: f64,
    pub container_bytes: usize,
    pub qsvd_seconds: f64,
}

impl ReportRow {
    pub fn new(image: impl Into<String>, mode: Mode, n: usize, t: usize, report: &QualityReport, container_bytes: usize, qsvd_seconds: f64) -> Self {
        Self {
            image: image.into(),
            mode,
            n,
            t,
            mse_r: report.mse[0],
            mse_g: report.mse[1],
            mse_b: report.mse[2],
            psnr_db: report.psnr_db,
            ssim: report.ssim,
            cr: report.cr.unwrap_or(f64::NAN),
            container_bytes,
            qsvd_seconds,
        }
    }

    pub fn report(&self) -> QualityReport {
        QualityReport {
            mse: [self.mse_r, self.mse_g, self.mse_b],
            psnr_db: self.psnr_db,
            ssim: self.ssim,
            cr: Some(self.cr).filter(|c| c.is_finite()),
        }
    }
}

pub fn write_rows<W: std::io::Write>(out: W, rows: &[ReportRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: std::io::Read>(input: R) -> Result<Vec<ReportRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}
