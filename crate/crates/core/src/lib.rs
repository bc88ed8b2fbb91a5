//! Full-quaternion color image toolkit.
//!
//! Adjacent RGB pixel pairs are mapped to single quaternions by a learned
//! 6→4→6 linear autoencoder, turning an `N x W` image into an `N x W/2`
//! quaternion matrix. Images are compressed by block-wise truncated
//! quaternion SVD of that matrix, with the classical pure-quaternion
//! embedding kept as a baseline.

pub mod autoencoder;
pub mod codec;
pub mod error;
pub mod harness;
pub mod image;
pub mod imageio;
pub mod matrix;
pub mod metrics;
pub mod qsvd;
pub mod quaternion;
pub mod representation;
pub mod scalar;

pub use autoencoder::{PairModel, PixelPairSample, TrainConfig};
pub use codec::{compress, decompress, CodecParams, CompressedContainer};
pub use error::{Error, Result};
pub use image::RgbImage;
pub use matrix::{ComplexMatrix, QuaternionMatrix};
pub use qsvd::{qsvd, reconstruct, QsvdFactors, TruncatedFactors};
pub use quaternion::Quaternion;
pub use representation::{Mode, QImageMeta};
pub use scalar::Real;

/// Double-precision quaternion, the working scalar of the image pipeline.
pub type Quat = Quaternion<f64>;
/// Double-precision quaternion matrix.
pub type QMat = QuaternionMatrix<f64>;
/// Single-precision quaternion matrix, the storage precision of containers.
pub type QMat32 = QuaternionMatrix<f32>;
