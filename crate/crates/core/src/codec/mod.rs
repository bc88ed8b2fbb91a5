//! Block QSVD codec.
//!
//! Encoding: image → quaternion matrix (full or pure) → `n x n` tiles →
//! per-tile QSVD truncated to rank `t` → `f32` factors → DEFLATE.
//! Decoding runs the same steps backwards.

mod backend;
mod container;

use std::ops::Neg;
use std::time::Instant;

use num_traits::Num;
use rayon::prelude::*;

pub use backend::{backend_compress, backend_decompress};
pub use container::{CompressedContainer, ContainerHeader, CONTAINER_MAGIC, CONTAINER_VERSION, HEADER_LEN};

use crate::autoencoder::PairModel;
use crate::error::{Error, Result};
use crate::image::RgbImage;
use crate::matrix::QuaternionMatrix;
use crate::qsvd::{qsvd, QsvdFactors, TruncatedFactors};
use crate::quaternion::Quaternion;
use crate::representation::{from_quaternion, to_quaternion, Mode, QImageMeta};

pub const BLOCK_SIZES: [usize; 5] = [16, 32, 64, 128, 256];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodecParams {
    pub block_size: usize,
    pub rank: usize,
    pub mode: Mode,
}

impl CodecParams {
    pub fn new(block_size: usize, rank: usize, mode: Mode) -> Result<Self> {
        let p = Self { block_size, rank, mode };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !BLOCK_SIZES.contains(&self.block_size) {
            return Err(Error::InvalidParam(format!(
                "block size {} not in {BLOCK_SIZES:?}",
                self.block_size
            )));
        }
        if self.rank == 0 || self.rank > self.block_size {
            return Err(Error::InvalidParam(format!(
                "rank {} outside 1..={}",
                self.rank, self.block_size
            )));
        }
        Ok(())
    }
}

/// `n x n` tiles in row-major order; edge tiles are replicate-padded.
pub fn split_blocks<T: Num + Copy + Neg<Output = T>>(q: &QuaternionMatrix<T>, n: usize) -> Vec<QuaternionMatrix<T>> {
    assert!(n >= 1, "block size must be positive");
    let (rows, cols) = q.shape();
    let mut out = Vec::with_capacity(rows.div_ceil(n) * cols.div_ceil(n));
    for r0 in (0..rows).step_by(n) {
        for c0 in (0..cols).step_by(n) {
            out.push(q.window_replicate(r0, c0, n, n));
        }
    }
    out
}

/// Inverse of [`split_blocks`]: reassembles a `rows x cols` matrix, discarding padding.
pub fn merge_blocks<T: Num + Copy + Neg<Output = T>>(blocks: &[QuaternionMatrix<T>], n: usize, rows: usize, cols: usize) -> Result<QuaternionMatrix<T>> {
    let grid_cols = cols.div_ceil(n);
    let expected = rows.div_ceil(n) * grid_cols;
    if blocks.len() != expected || blocks.iter().any(|b| b.shape() != (n, n)) {
        return Err(Error::Shape(format!(
            "{} blocks cannot tile a {rows}x{cols} matrix with n = {n}",
            blocks.len()
        )));
    }
    Ok(QuaternionMatrix::from_fn(rows, cols, |i, j| {
        blocks[(i / n) * grid_cols + j / n][(i % n, j % n)]
    }))
}

/// QSVD of every block; output order matches input order either way.
pub fn factorize_blocks(blocks: &[QuaternionMatrix<f64>], parallel: bool) -> Result<Vec<QsvdFactors<f64>>> {
    if parallel {
        blocks.par_iter().map(qsvd).collect()
    } else {
        blocks.iter().map(qsvd).collect()
    }
}

/// An image already factorized at one block size; any rank up to `n` can be
/// encoded from it without repeating the QSVDs.
#[derive(Clone, Debug)]
pub struct FactorizedImage {
    pub meta: QImageMeta,
    pub height: usize,
    pub matrix_shape: (usize, usize),
    pub block_size: usize,
    pub model_crc: u32,
    pub factors: Vec<QsvdFactors<f64>>,
    /// Wall-clock seconds spent in QSVD alone.
    pub qsvd_seconds: f64,
}

impl FactorizedImage {
    pub fn new(img: &RgbImage, model: Option<&PairModel>, block_size: usize, mode: Mode, parallel: bool) -> Result<Self> {
        CodecParams::new(block_size, 1, mode)?;
        let (q, meta) = to_quaternion(img, mode, model)?;
        let blocks = split_blocks(&q, block_size);
        let start = Instant::now();
        let factors = factorize_blocks(&blocks, parallel)?;
        let qsvd_seconds = start.elapsed().as_secs_f64();
        let model_crc = match mode {
            Mode::Full => model.map(PairModel::checksum).unwrap_or(0),
            Mode::Pure => 0,
        };
        Ok(Self {
            meta,
            height: img.height(),
            matrix_shape: q.shape(),
            block_size,
            model_crc,
            factors,
            qsvd_seconds,
        })
    }

    /// Serializes the rank-`t` truncation of every block.
    pub fn raw_payload(&self, t: usize) -> Result<Vec<u8>> {
        CodecParams::new(self.block_size, t, self.meta.mode)?;
        let n = self.block_size;
        let mut out = Vec::with_capacity(container::block_payload_len(n, t) * self.factors.len());
        for f in &self.factors {
            let tf = f.truncate(t)?.cast::<f32>();
            push_quaternions(&mut out, tf.u());
            for s in tf.sigma() {
                out.extend_from_slice(&s.to_le_bytes());
            }
            push_quaternions(&mut out, tf.v());
        }
        Ok(out)
    }

    pub fn encode(&self, t: usize) -> Result<CompressedContainer> {
        let raw = self.raw_payload(t)?;
        let (rows, cols) = self.matrix_shape;
        let header = ContainerHeader {
            version: CONTAINER_VERSION,
            mode: self.meta.mode,
            block_size: to_u16(self.block_size)?,
            rank: to_u16(t)?,
            height: to_u32(self.height)?,
            original_width: to_u32(self.meta.original_width)?,
            padded_width: to_u32(self.meta.padded_width)?,
            matrix_rows: to_u32(rows)?,
            matrix_cols: to_u32(cols)?,
            model_crc: self.model_crc,
            payload_len: raw.len() as u64,
        };
        Ok(CompressedContainer {
            header,
            packed: backend_compress(&raw),
        })
    }
}

fn to_u16(x: usize) -> Result<u16> {
    u16::try_from(x).map_err(|_| Error::InvalidParam(format!("{x} does not fit the container header")))
}

fn to_u32(x: usize) -> Result<u32> {
    u32::try_from(x).map_err(|_| Error::InvalidParam(format!("{x} does not fit the container header")))
}

fn push_quaternions(out: &mut Vec<u8>, m: &QuaternionMatrix<f32>) {
    for q in m.as_slice() {
        for x in q.to_array() {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
}

/// Full pipeline. `model` is required in full mode and ignored in pure mode.
pub fn compress(img: &RgbImage, model: Option<&PairModel>, p: &CodecParams) -> Result<CompressedContainer> {
    p.validate()?;
    if p.mode == Mode::Full {
        model.ok_or(Error::MissingModel)?.validate()?;
    }
    FactorizedImage::new(img, model, p.block_size, p.mode, true)?.encode(p.rank)
}

pub fn decompress(c: &CompressedContainer, model: Option<&PairModel>) -> Result<RgbImage> {
    let h = &c.header;
    if h.mode == Mode::Full {
        let m = model.ok_or(Error::MissingModel)?;
        let found = m.checksum();
        if found != h.model_crc {
            return Err(Error::WrongModel {
                expected: h.model_crc,
                found,
            });
        }
    }
    let (n, t) = (h.block_size as usize, h.rank as usize);
    let expected = h.expected_payload_len() as usize;
    let raw = backend_decompress(&c.packed, expected)?;
    if raw.len() != expected {
        return Err(Error::Corrupt(format!("payload is {} bytes, expected {expected}", raw.len())));
    }

    let floats: Vec<f64> = raw
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().expect("4 bytes")) as f64)
        .collect();
    let mut rest = floats.as_slice();
    let mut take = |count: usize| {
        let (head, tail) = rest.split_at(count);
        rest = tail;
        head
    };
    let quaternions = |xs: &[f64]| -> Vec<Quaternion<f64>> {
        xs.chunks_exact(4).map(|c| Quaternion::new(c[0], c[1], c[2], c[3])).collect()
    };
    let mut blocks = Vec::with_capacity(h.block_count());
    for _ in 0..h.block_count() {
        let u = QuaternionMatrix::new(n, t, quaternions(take(4 * n * t)))?;
        let sigma = take(t).to_vec();
        let v = QuaternionMatrix::new(n, t, quaternions(take(4 * n * t)))?;
        let block = crate::qsvd::reconstruct(&TruncatedFactors::new(u, sigma, v)?);
        if !block.is_finite() {
            return Err(Error::Corrupt("non-finite factor values".into()));
        }
        blocks.push(block);
    }
    let q = merge_blocks(&blocks, n, h.matrix_rows as usize, h.matrix_cols as usize)?;
    from_quaternion(&q, &h.meta(), model)
}
