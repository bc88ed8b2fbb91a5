use crate::error::{Error, Result};

/// 8-bit RGB raster, row-major, interleaved `R, G, B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    height: usize,
    width: usize,
    samples: Vec<u8>,
}

impl RgbImage {
    pub fn new(height: usize, width: usize, samples: Vec<u8>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidParam(format!("empty image dimensions {height}x{width}")));
        }
        if samples.len() != height * width * 3 {
            return Err(Error::Shape(format!(
                "{} samples for a {height}x{width} RGB image",
                samples.len()
            )));
        }
        Ok(Self { height, width, samples })
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Result<Self> {
        let mut samples = Vec::with_capacity(height * width * 3);
        for r in 0..height {
            for c in 0..width {
                samples.extend_from_slice(&f(r, c));
            }
        }
        Self::new(height, width, samples)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        let o = (row * self.width + col) * 3;
        [self.samples[o], self.samples[o + 1], self.samples[o + 2]]
    }

    /// One color plane (0 = R, 1 = G, 2 = B) in row-major order.
    pub fn channel(&self, k: usize) -> Vec<u8> {
        assert!(k < 3, "channel index {k}");
        self.samples.iter().skip(k).step_by(3).copied().collect()
    }

    /// Size of the raw 24-bit representation in bytes.
    pub fn raw_size(&self) -> usize {
        self.samples.len()
    }

    /// Appends a copy of the last column when the width is odd.
    pub fn pad_even_columns(&self) -> RgbImage {
        if self.width % 2 == 0 {
            return self.clone();
        }
        let w = self.width;
        Self::from_fn(self.height, w + 1, |r, c| self.pixel(r, c.min(w - 1))).expect("non-empty")
    }

    /// Rows `r0..r1` and columns `c0..c1`.
    pub fn crop(&self, r0: usize, c0: usize, r1: usize, c1: usize) -> Result<Self> {
        if r1 > self.height || c1 > self.width || r0 >= r1 || c0 >= c1 {
            return Err(Error::InvalidParam(format!(
                "crop {r0}..{r1} x {c0}..{c1} of {}x{}",
                self.height, self.width
            )));
        }
        Self::from_fn(r1 - r0, c1 - c0, |r, c| self.pixel(r0 + r, c0 + c))
    }
}
