//! Container layout, little-endian throughout:
//!
//! ```text
//! "QSVC" | version u16 | mode u8 | n u16 | t u16 | height u32
//! | original width u32 | padded width u32 | matrix rows u32 | matrix cols u32
//! | model CRC-32 u32 | payload length u64 | DEFLATE payload
//! ```
//!
//! The inflated payload holds, per block in row-major block order, `U_t` as
//! `n·t` quaternions (`a, b, c, d` as `f32`, row-major), `Σ_t` as `t` `f32`
//! and `V_t` as `n·t` quaternions.

use crate::error::{Error, Result};
use crate::representation::{Mode, QImageMeta};

pub const CONTAINER_MAGIC: &[u8; 4] = b"QSVC";
pub const CONTAINER_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 4 + 2 + 1 + 2 + 2 + 4 * 6 + 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContainerHeader {
    pub version: u16,
    pub mode: Mode,
    pub block_size: u16,
    pub rank: u16,
    pub height: u32,
    pub original_width: u32,
    pub padded_width: u32,
    pub matrix_rows: u32,
    pub matrix_cols: u32,
    pub model_crc: u32,
    /// Length of the payload before the lossless stage.
    pub payload_len: u64,
}

impl ContainerHeader {
    pub fn meta(&self) -> QImageMeta {
        QImageMeta {
            original_width: self.original_width as usize,
            padded_width: self.padded_width as usize,
            mode: self.mode,
        }
    }

    pub fn block_count(&self) -> usize {
        let n = self.block_size as usize;
        (self.matrix_rows as usize).div_ceil(n) * (self.matrix_cols as usize).div_ceil(n)
    }

    /// Payload bytes implied by the block grid and rank.
    pub fn expected_payload_len(&self) -> u64 {
        block_payload_len(self.block_size as usize, self.rank as usize) as u64 * self.block_count() as u64
    }

    fn to_bytes(self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN);
        out.extend_from_slice(CONTAINER_MAGIC);
        out.extend_from_slice(&self.version.to_le_bytes());
        out.push(self.mode.code());
        out.extend_from_slice(&self.block_size.to_le_bytes());
        out.extend_from_slice(&self.rank.to_le_bytes());
        for v in [
            self.height,
            self.original_width,
            self.padded_width,
            self.matrix_rows,
            self.matrix_cols,
            self.model_crc,
        ] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&self.payload_len.to_le_bytes());
        out
    }

    fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != CONTAINER_MAGIC {
            return Err(Error::BadMagic { expected: "QSVC" });
        }
        if bytes.len() < HEADER_LEN {
            return Err(Error::Corrupt(format!("{} bytes is shorter than the header", bytes.len())));
        }
        let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let version = u16_at(4);
        if version != CONTAINER_VERSION {
            return Err(Error::UnsupportedVersion {
                found: version,
                supported: CONTAINER_VERSION,
            });
        }
        let mode = Mode::from_code(bytes[6]).ok_or_else(|| Error::Corrupt(format!("unknown mode code {}", bytes[6])))?;
        let header = Self {
            version,
            mode,
            block_size: u16_at(7),
            rank: u16_at(9),
            height: u32_at(11),
            original_width: u32_at(15),
            padded_width: u32_at(19),
            matrix_rows: u32_at(23),
            matrix_cols: u32_at(27),
            model_crc: u32_at(31),
            payload_len: u64::from_le_bytes(bytes[35..43].try_into().expect("8 bytes")),
        };
        header.check()?;
        Ok(header)
    }

    /// Cross-field consistency.
    fn check(&self) -> Result<()> {
        let n = self.block_size as usize;
        if !super::BLOCK_SIZES.contains(&n) {
            return Err(Error::Corrupt(format!("unsupported block size {n}")));
        }
        if self.rank == 0 || self.rank > self.block_size {
            return Err(Error::Corrupt(format!("rank {} outside 1..={n}", self.rank)));
        }
        let meta = self.meta();
        meta.validate()?;
        if self.height == 0 || self.matrix_rows != self.height || self.matrix_cols as usize != meta.matrix_cols() {
            return Err(Error::Corrupt(format!(
                "matrix {}x{} inconsistent with {}x{} {} image",
                self.matrix_rows, self.matrix_cols, self.height, self.original_width, self.mode
            )));
        }
        if self.mode == Mode::Pure && self.model_crc != 0 {
            return Err(Error::Corrupt("pure-mode container carries a model checksum".into()));
        }
        if self.payload_len != self.expected_payload_len() {
            return Err(Error::Corrupt(format!(
                "declared payload {} bytes, block grid needs {}",
                self.payload_len,
                self.expected_payload_len()
            )));
        }
        Ok(())
    }
}

pub(super) fn block_payload_len(n: usize, t: usize) -> usize {
    (2 * n * t * 4 + t) * 4
}

/// Header plus the backend-compressed payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedContainer {
    pub header: ContainerHeader,
    pub packed: Vec<u8>,
}

impl CompressedContainer {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.header.to_bytes();
        out.extend_from_slice(&self.packed);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header = ContainerHeader::parse(bytes)?;
        Ok(Self {
            header,
            packed: bytes[HEADER_LEN..].to_vec(),
        })
    }

    /// Size of the serialized container in bytes.
    pub fn byte_len(&self) -> usize {
        HEADER_LEN + self.packed.len()
    }
}
