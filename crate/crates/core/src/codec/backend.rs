//! Lossless byte stage: zlib-wrapped DEFLATE at the highest compression level.

use std::io::{Read, Write};

use flate2::read::ZlibDecoder;
use flate2::write::ZlibEncoder;
use flate2::Compression;

use crate::error::{Error, Result};

pub fn backend_compress(bytes: &[u8]) -> Vec<u8> {
    let mut enc = ZlibEncoder::new(Vec::with_capacity(bytes.len() / 2 + 64), Compression::best());
    enc.write_all(bytes).expect("writing to a Vec cannot fail");
    enc.finish().expect("writing to a Vec cannot fail")
}

/// Inflates `bytes`, refusing to produce more than `limit` bytes.
pub fn backend_decompress(bytes: &[u8], limit: usize) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    ZlibDecoder::new(bytes)
        .take(limit as u64 + 1)
        .read_to_end(&mut out)
        .map_err(|e| Error::Corrupt(format!("payload stream: {e}")))?;
    if out.len() > limit {
        return Err(Error::Corrupt(format!("payload exceeds declared {limit} bytes")));
    }
    Ok(out)
}
