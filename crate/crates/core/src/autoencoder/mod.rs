//! Linear 6→4→6 autoencoder mapping a pair of adjacent RGB pixels to the
//! four components of a full quaternion.
//!
//! Encoder and decoder are single affine layers with identity activation.
//! Latent unit `k` becomes quaternion component `k` in `(a, b, c, d)` order.

mod model_file;
mod train;

use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use model_file::{load_model, save_model, MODEL_MAGIC, MODEL_VERSION};
pub use train::{loss_and_gradient, train, PairMoments, TrainOutcome};

use crate::error::{Error, Result};
use crate::image::RgbImage;
use crate::quaternion::Quaternion;

pub const INPUTS: usize = 6;
pub const LATENT: usize = 4;
/// Number of trainable parameters: encoder and decoder weights plus biases.
pub const PARAM_COUNT: usize = LATENT * INPUTS + LATENT + INPUTS * LATENT + INPUTS;

/// Two horizontally adjacent pixels, `R, G, B` of the left then the right
/// pixel, normalized to `[0, 1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PixelPairSample(pub [f64; INPUTS]);

/// Trained encoder/decoder weights.
#[derive(Clone, Debug, PartialEq)]
pub struct PairModel {
    pub w_enc: [[f64; INPUTS]; LATENT],
    pub b_enc: [f64; LATENT],
    pub w_dec: [[f64; LATENT]; INPUTS],
    pub b_dec: [f64; INPUTS],
    /// Divisor mapping 8-bit samples to model inputs.
    pub norm_scale: f64,
    pub format_version: u16,
}

impl Default for PairModel {
    fn default() -> Self {
        Self {
            w_enc: [[0.0; INPUTS]; LATENT],
            b_enc: [0.0; LATENT],
            w_dec: [[0.0; LATENT]; INPUTS],
            b_dec: [0.0; INPUTS],
            norm_scale: 255.0,
            format_version: MODEL_VERSION,
        }
    }
}

impl PairModel {
    /// Parameters flattened as `w_enc` (row-major), `b_enc`, `w_dec` (row-major), `b_dec`.
    pub fn params(&self) -> [f64; PARAM_COUNT] {
        let mut out = [0.0; PARAM_COUNT];
        let it = self
            .w_enc
            .iter()
            .flatten()
            .chain(&self.b_enc)
            .chain(self.w_dec.iter().flatten())
            .chain(&self.b_dec);
        for (o, &x) in out.iter_mut().zip(it) {
            *o = x;
        }
        out
    }

    pub fn set_params(&mut self, p: &[f64; PARAM_COUNT]) {
        let mut it = p.iter().copied();
        for x in self
            .w_enc
            .iter_mut()
            .flatten()
            .chain(&mut self.b_enc)
            .chain(self.w_dec.iter_mut().flatten())
            .chain(&mut self.b_dec)
        {
            *x = it.next().expect("PARAM_COUNT entries");
        }
    }

    pub fn from_params(p: &[f64; PARAM_COUNT], norm_scale: f64) -> Self {
        let mut m = Self {
            norm_scale,
            ..Self::default()
        };
        m.set_params(p);
        m
    }

    pub fn is_finite(&self) -> bool {
        self.norm_scale.is_finite() && self.norm_scale > 0.0 && self.params().iter().all(|x| x.is_finite())
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParam("model has non-finite parameters or scale".into()))
        }
    }

    /// `W_enc · s + b_enc` as a quaternion.
    pub fn encode_pair(&self, s: &PixelPairSample) -> Quaternion<f64> {
        let mut z = self.b_enc;
        for (zk, row) in z.iter_mut().zip(&self.w_enc) {
            *zk += row.iter().zip(&s.0).map(|(w, x)| w * x).sum::<f64>();
        }
        Quaternion::from_array(z)
    }

    /// Raw affine decoder output `W_dec · (a, b, c, d) + b_dec`, unclamped.
    pub fn decode_pair_raw(&self, q: Quaternion<f64>) -> [f64; INPUTS] {
        let z = q.to_array();
        let mut out = self.b_dec;
        for (o, row) in out.iter_mut().zip(&self.w_dec) {
            *o += row.iter().zip(&z).map(|(w, x)| w * x).sum::<f64>();
        }
        out
    }

    /// Decoder output clamped to `[0, 1]`.
    pub fn decode_pair(&self, q: Quaternion<f64>) -> PixelPairSample {
        PixelPairSample(self.decode_pair_raw(q).map(|x| x.clamp(0.0, 1.0)))
    }

    /// Mean squared per-subpixel error of `decode(encode(s))` over `samples`.
    pub fn reconstruction_mse(&self, samples: &[PixelPairSample]) -> f64 {
        let total: f64 = samples
            .iter()
            .map(|s| {
                let r = self.decode_pair_raw(self.encode_pair(s));
                r.iter().zip(&s.0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
            })
            .sum();
        total / (samples.len() * INPUTS) as f64
    }

    /// CRC-32 of the serialized parameters; containers record it to bind
    /// themselves to a model.
    pub fn checksum(&self) -> u32 {
        model_file::payload_crc(self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub l2_lambda: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub full_batch: bool,
    pub seed: u64,
    pub convergence_tol: f64,
    pub max_pairs_per_image: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            l2_lambda: 1e-4,
            learning_rate: 1e-2,
            max_epochs: 20_000,
            full_batch: true,
            seed: 0,
            convergence_tol: 1e-10,
            max_pairs_per_image: 4096,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParam(format!("train config: {what}")));
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return bad("l2_lambda must be a nonnegative finite number");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be positive");
        }
        if !(self.convergence_tol > 0.0) {
            return bad("convergence_tol must be positive");
        }
        if self.max_pairs_per_image == 0 {
            return bad("max_pairs_per_image must be positive");
        }
        if !self.full_batch {
            return bad("only full-batch training is supported");
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. Unset keys keep defaults.
    pub fn parse_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidParam(format!("config line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || Error::InvalidParam(format!("config line {}: bad value {value:?} for {key}", lineno + 1));
            fn num<T: FromStr>(v: &str, bad: impl Fn() -> Error) -> Result<T> {
                v.parse().map_err(|_| bad())
            }
            match key {
                "l2_lambda" => cfg.l2_lambda = num(value, bad)?,
                "learning_rate" => cfg.learning_rate = num(value, bad)?,
                "max_epochs" => cfg.max_epochs = num(value, bad)?,
                "full_batch" => cfg.full_batch = num(value, bad)?,
                "seed" => cfg.seed = num(value, bad)?,
                "convergence_tol" => cfg.convergence_tol = num(value, bad)?,
                "max_pairs_per_image" => cfg.max_pairs_per_image = num(value, bad)?,
                other => {
                    return Err(Error::InvalidParam(format!(
                        "config line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Normalized pixel pairs at even column offsets of each (column-padded)
/// image. Images with more than `max_pairs_per_image` pairs are subsampled
/// uniformly without replacement from a generator seeded with `cfg.seed`.
pub fn extract_pairs(images: &[RgbImage], cfg: &TrainConfig) -> Result<Vec<PixelPairSample>> {
    if images.is_empty() {
        return Err(Error::InsufficientData("empty image corpus".into()));
    }
    let scale = PairModel::default().norm_scale;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    for img in images {
        let img = img.pad_even_columns();
        let per_row = img.width() / 2;
        let total = img.height() * per_row;
        let pair_at = |idx: usize| {
            let (r, j) = (idx / per_row, idx % per_row);
            let (left, right) = (img.pixel(r, 2 * j), img.pixel(r, 2 * j + 1));
            let mut s = [0.0; INPUTS];
            for k in 0..3 {
                s[k] = left[k] as f64 / scale;
                s[k + 3] = right[k] as f64 / scale;
            }
            PixelPairSample(s)
        };
        if total <= cfg.max_pairs_per_image {
            out.extend((0..total).map(pair_at));
        } else {
            let mut picked = index::sample(&mut rng, total, cfg.max_pairs_per_image).into_vec();
            picked.sort_unstable();
            out.extend(picked.into_iter().map(pair_at));
        }
    }
    Ok(out)
}
