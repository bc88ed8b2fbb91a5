//! Binary PPM (P6) and PNG reading/writing, plus the train/test corpus manifest.

use std::fmt;
use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image::RgbImage;

const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', b'\r', b'\n', 0x1a, b'\n'];

/// Fraction of a corpus assigned to the training split.
pub const TRAIN_FRACTION: f64 = 0.6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    Ppm,
    Png,
}

impl ImageFormat {
    /// Guesses from the file extension; anything but `.ppm` is PNG.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("ppm") => ImageFormat::Ppm,
            _ => ImageFormat::Png,
        }
    }
}

pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    decode_image(&fs::read(path)?)
}

/// Decodes PPM or PNG, sniffing the format from the leading bytes.
pub fn decode_image(bytes: &[u8]) -> Result<RgbImage> {
    if bytes.starts_with(b"P6") {
        decode_ppm(bytes)
    } else if bytes.starts_with(&PNG_SIGNATURE) {
        decode_png(bytes)
    } else if bytes.len() >= 2 && bytes[0] == b'P' && bytes[1].is_ascii_digit() {
        Err(Error::UnsupportedImage(format!(
            "netpbm variant P{} (only binary P6 is supported)",
            bytes[1] as char
        )))
    } else {
        Err(Error::UnsupportedImage("unrecognized image format".into()))
    }
}

pub fn save_image(img: &RgbImage, path: impl AsRef<Path>, format: ImageFormat) -> Result<()> {
    let bytes = match format {
        ImageFormat::Ppm => encode_ppm(img),
        ImageFormat::Png => encode_png(img)?,
    };
    fs::write(path, bytes)?;
    Ok(())
}

pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.samples());
    out
}

pub fn decode_ppm(bytes: &[u8]) -> Result<RgbImage> {
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::MalformedHeader("header ends early".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::MalformedHeader(format!("expected a number at byte {start}")));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedHeader("number out of range".into()))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::MalformedHeader("missing separator after maxval".into())),
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(Error::UnsupportedImage(format!("PPM maxval {maxval} (requires 255)")));
    }
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!("zero dimension {width}x{height}")));
    }
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::MalformedHeader("dimensions overflow".into()))?;
    let data = &bytes[pos..];
    if data.len() < need {
        return Err(Error::TruncatedImage);
    }
    RgbImage::new(height, width, data[..need].to_vec())
}

pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header()?;
        writer.write_image_data(img.samples())?;
    }
    Ok(out)
}

pub fn decode_png(bytes: &[u8]) -> Result<RgbImage> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info()?;
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf)?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedImage(format!("{:?}-bit PNG (requires 8-bit)", info.bit_depth)));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let samples = match info.color_type {
        png::ColorType::Rgb => buf[..w * h * 3].to_vec(),
        png::ColorType::Rgba => buf[..w * h * 4]
            .chunks_exact(4)
            .flat_map(|p| [p[0], p[1], p[2]])
            .collect(),
        other => {
            return Err(Error::UnsupportedImage(format!(
                "requires 3-channel color, found {other:?}"
            )))
        }
    };
    RgbImage::new(h, w, samples)
}

/// PNG and PPM files directly inside `dir`, sorted by path.
pub fn list_images(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("png") || e.eq_ignore_ascii_case("ppm"))
        })
        .collect();
    out.sort();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(Error::InvalidParam(format!("unknown split tag {other:?}"))),
        }
    }
}

/// Seeded train/test partition of an image corpus.
///
/// Text form: a `# seed=<n>` line followed by `path<TAB>split` lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusManifest {
    pub seed: u64,
    pub entries: Vec<(PathBuf, Split)>,
}

impl CorpusManifest {
    pub fn paths(&self, split: Split) -> impl Iterator<Item = &Path> {
        self.entries
            .iter()
            .filter(move |(_, s)| *s == split)
            .map(|(p, _)| p.as_path())
    }

    pub fn count(&self, split: Split) -> usize {
        self.paths(split).count()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# seed={}\n", self.seed);
        for (p, split) in &self.entries {
            s.push_str(&format!("{}\t{split}\n", p.display()));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let seed = lines
            .next()
            .and_then(|l| l.strip_prefix("# seed="))
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::InvalidParam("manifest must start with '# seed=<n>'".into()))?;
        let mut entries = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let (path, tag) = line
                .rsplit_once('\t')
                .ok_or_else(|| Error::InvalidParam(format!("manifest line without tab: {line:?}")))?;
            entries.push((PathBuf::from(path), tag.trim().parse()?));
        }
        Ok(Self { seed, entries })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

/// Seeded shuffle; the first `round(0.6 n)` images (at least one, leaving at
/// least one) are the training split. Entries keep their shuffled order.
pub fn split_corpus(paths: &[PathBuf], seed: u64) -> Result<CorpusManifest> {
    if paths.is_empty() {
        return Err(Error::InsufficientData("empty corpus".into()));
    }
    if paths.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "corpus of {} image cannot be split into train and test",
            paths.len()
        )));
    }
    let n = paths.len();
    let train = ((n as f64 * TRAIN_FRACTION).round() as usize).clamp(1, n - 1);
    let mut shuffled = paths.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let entries = shuffled
        .into_iter()
        .enumerate()
        .map(|(i, p)| (p, if i < train { Split::Train } else { Split::Test }))
        .collect();
    Ok(CorpusManifest { seed, entries })
}
