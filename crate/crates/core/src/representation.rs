//! RGB ↔ quaternion matrix conversions.
//!
//! * Full mode: each horizontal pixel pair `(i, 2j), (i, 2j+1)` is encoded
//!   by the [`PairModel`] into one quaternion, giving an `N x ceil(W/2)`
//!   matrix. Odd widths are replicate-padded first.
//! * Pure mode: pixel `(R, G, B)` becomes `0 + Ri + Gj + Bk` at the raw
//!   `[0, 255]` scale, giving an `N x W` matrix.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::autoencoder::{PairModel, PixelPairSample};
use crate::error::{Error, Result};
use crate::image::RgbImage;
use crate::matrix::QuaternionMatrix;
use crate::quaternion::Quaternion;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Pure,
}

impl Mode {
    pub fn code(self) -> u8 {
        match self {
            Mode::Full => 0,
            Mode::Pure => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Mode::Full),
            1 => Some(Mode::Pure),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Pure => "pure",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Mode::Full),
            "pure" => Ok(Mode::Pure),
            other => Err(Error::InvalidParam(format!("unknown mode {other:?} (full|pure)"))),
        }
    }
}

/// What is needed to turn a quaternion matrix back into the original raster.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QImageMeta {
    pub original_width: usize,
    pub padded_width: usize,
    pub mode: Mode,
}

impl QImageMeta {
    pub fn for_width(width: usize, mode: Mode) -> Self {
        let padded_width = match mode {
            Mode::Full => width + width % 2,
            Mode::Pure => width,
        };
        Self {
            original_width: width,
            padded_width,
            mode,
        }
    }

    /// Quaternion columns for this width and mode.
    pub fn matrix_cols(&self) -> usize {
        match self.mode {
            Mode::Full => self.padded_width / 2,
            Mode::Pure => self.padded_width,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.original_width >= 1
            && self.padded_width >= self.original_width
            && self.padded_width <= self.original_width + 1
            && match self.mode {
                Mode::Full => self.padded_width % 2 == 0,
                Mode::Pure => self.padded_width == self.original_width,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::Corrupt(format!("inconsistent image metadata {self:?}")))
        }
    }
}

pub fn pad_even_columns(img: &RgbImage) -> RgbImage {
    img.pad_even_columns()
}

/// Maps an affine output in `[0, 1]` (model scale) back to an 8-bit sample,
/// rounding half away from zero.
fn quantize(x: f64) -> u8 {
    x.round().clamp(0.0, 255.0) as u8
}

pub fn to_full_quaternion(img: &RgbImage, model: &PairModel) -> (QuaternionMatrix<f64>, QImageMeta) {
    let meta = QImageMeta::for_width(img.width(), Mode::Full);
    let padded = img.pad_even_columns();
    let scale = model.norm_scale;
    let q = QuaternionMatrix::from_fn(img.height(), meta.matrix_cols(), |i, j| {
        let (l, r) = (padded.pixel(i, 2 * j), padded.pixel(i, 2 * j + 1));
        let s = PixelPairSample([l[0], l[1], l[2], r[0], r[1], r[2]].map(|x| x as f64 / scale));
        model.encode_pair(&s)
    });
    (q, meta)
}

pub fn from_full_quaternion(q: &QuaternionMatrix<f64>, meta: &QImageMeta, model: &PairModel) -> Result<RgbImage> {
    meta.validate()?;
    if meta.mode != Mode::Full {
        return Err(Error::InvalidParam("metadata is not for a full-quaternion matrix".into()));
    }
    if q.cols() != meta.matrix_cols() || q.rows() == 0 {
        return Err(Error::Shape(format!(
            "{}x{} quaternion matrix does not match padded width {}",
            q.rows(),
            q.cols(),
            meta.padded_width
        )));
    }
    let scale = model.norm_scale;
    let mut samples = Vec::with_capacity(q.rows() * meta.original_width * 3);
    for i in 0..q.rows() {
        for j in 0..q.cols() {
            let y = model.decode_pair_raw(q[(i, j)]);
            let left = &y[..3];
            samples.extend(left.iter().map(|&x| quantize(x * scale)));
            if 2 * j + 1 < meta.original_width {
                samples.extend(y[3..].iter().map(|&x| quantize(x * scale)));
            }
        }
    }
    RgbImage::new(q.rows(), meta.original_width, samples)
}

pub fn to_pure_quaternion(img: &RgbImage) -> QuaternionMatrix<f64> {
    QuaternionMatrix::from_fn(img.height(), img.width(), |i, j| {
        let [r, g, b] = img.pixel(i, j);
        Quaternion::pure(r as f64, g as f64, b as f64)
    })
}

/// Drops the scalar part and quantizes the vector part.
pub fn from_pure_quaternion(q: &QuaternionMatrix<f64>) -> Result<RgbImage> {
    RgbImage::from_fn(q.rows(), q.cols(), |i, j| {
        let e = q[(i, j)];
        [quantize(e.b), quantize(e.c), quantize(e.d)]
    })
}

/// Representation for either mode; `model` is required only in full mode.
pub fn to_quaternion(img: &RgbImage, mode: Mode, model: Option<&PairModel>) -> Result<(QuaternionMatrix<f64>, QImageMeta)> {
    match mode {
        Mode::Full => {
            let model = model.ok_or(Error::MissingModel)?;
            model.validate()?;
            Ok(to_full_quaternion(img, model))
        }
        Mode::Pure => Ok((to_pure_quaternion(img), QImageMeta::for_width(img.width(), Mode::Pure))),
    }
}

pub fn from_quaternion(q: &QuaternionMatrix<f64>, meta: &QImageMeta, model: Option<&PairModel>) -> Result<RgbImage> {
    match meta.mode {
        Mode::Full => from_full_quaternion(q, meta, model.ok_or(Error::MissingModel)?),
        Mode::Pure => {
            meta.validate()?;
            if q.cols() != meta.original_width {
                return Err(Error::Shape(format!(
                    "{} columns for an image of width {}",
                    q.cols(),
                    meta.original_width
                )));
            }
            from_pure_quaternion(q)
        }
    }
}
