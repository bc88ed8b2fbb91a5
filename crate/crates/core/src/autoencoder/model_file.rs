//! Model file: `"QPM1"`, version `u16`, `norm_scale` `f64`, then `W_enc`
//! (row-major), `b_enc`, `W_dec` (row-major), `b_dec` as `f64`, followed by
//! the CRC-32 of every preceding byte. Little-endian throughout.

use super::{PairModel, PARAM_COUNT};
use crate::error::{Error, Result};

pub const MODEL_MAGIC: &[u8; 4] = b"QPM1";
pub const MODEL_VERSION: u16 = 1;

const BODY_LEN: usize = 4 + 2 + 8 + PARAM_COUNT * 8;
const FILE_LEN: usize = BODY_LEN + 4;

fn body(m: &PairModel) -> Vec<u8> {
    let mut out = Vec::with_capacity(FILE_LEN);
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.extend_from_slice(&m.norm_scale.to_le_bytes());
    for p in m.params() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

pub(super) fn payload_crc(m: &PairModel) -> u32 {
    crc32fast::hash(&body(m))
}

pub fn save_model(m: &PairModel) -> Vec<u8> {
    let mut out = body(m);
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

/// Checks, in order: magic, version, length and checksum.
pub fn load_model(bytes: &[u8]) -> Result<PairModel> {
    if bytes.len() < 4 || &bytes[..4] != MODEL_MAGIC {
        return Err(Error::BadMagic { expected: "QPM1" });
    }
    let version = match bytes.get(4..6) {
        Some(v) => u16::from_le_bytes([v[0], v[1]]),
        None => return Err(Error::Checksum),
    };
    if version != MODEL_VERSION {
        return Err(Error::UnsupportedVersion {
            found: version,
            supported: MODEL_VERSION,
        });
    }
    if bytes.len() != FILE_LEN {
        return Err(Error::Checksum);
    }
    let stored = u32::from_le_bytes(bytes[BODY_LEN..].try_into().expect("4 bytes"));
    if crc32fast::hash(&bytes[..BODY_LEN]) != stored {
        return Err(Error::Checksum);
    }
    let f64_at = |off: usize| f64::from_le_bytes(bytes[off..off + 8].try_into().expect("8 bytes"));
    let norm_scale = f64_at(6);
    let params: [f64; PARAM_COUNT] = std::array::from_fn(|i| f64_at(14 + 8 * i));
    let model = PairModel {
        format_version: version,
        ..PairModel::from_params(&params, norm_scale)
    };
    model.validate()?;
    Ok(model)
}
