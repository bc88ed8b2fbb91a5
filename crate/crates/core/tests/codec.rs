use fullquat::autoencoder::{extract_pairs, train};
use fullquat::codec::{
    backend_decompress, factorize_blocks, merge_blocks, split_blocks, FactorizedImage, HEADER_LEN,
};
use fullquat::representation::to_pure_quaternion;
use fullquat::{
    compress, decompress, CodecParams, CompressedContainer, Error, Mode, PairModel, QMat, Quat, RgbImage,
    TrainConfig,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn smooth_image(h: usize, w: usize) -> RgbImage {
    RgbImage::from_fn(h, w, |r, c| {
        let x = r as f64 / h as f64;
        let y = c as f64 / w as f64;
        [
            (120.0 + 100.0 * (3.0 * x + y).sin()) as u8,
            (128.0 + 90.0 * (2.0 * y).cos() * x) as u8,
            (60.0 + 150.0 * x * y) as u8,
        ]
    })
    .unwrap()
}

fn trained_model() -> PairModel {
    let cfg = TrainConfig { max_epochs: 3000, ..TrainConfig::default() };
    let samples = extract_pairs(&[smooth_image(64, 64)], &cfg).unwrap();
    train(&samples, &cfg).unwrap().model
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> QMat {
    QMat::from_fn(rows, cols, |_, _| Quat::from_array(std::array::from_fn(|_| rng.gen_range(-1.0..1.0))))
}

#[test]
fn exact_tiling() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let q = random_matrix(&mut rng, 64, 64);
    let blocks = split_blocks(&q, 32);
    assert_eq!(blocks.len(), 4);
    assert!(blocks.iter().all(|b| b.shape() == (32, 32)));
    assert_eq!(blocks[1][(0, 0)], q[(0, 32)]);
    assert_eq!(blocks[2][(0, 0)], q[(32, 0)]);
}

#[test]
fn edge_tiles_replicate() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let q = random_matrix(&mut rng, 40, 40);
    let blocks = split_blocks(&q, 32);
    assert_eq!(blocks.len(), 4);
    let corner = &blocks[3];
    assert_eq!(corner.shape(), (32, 32));
    for i in 0..32 {
        for j in 0..32 {
            assert_eq!(corner[(i, j)], q[((32 + i).min(39), (32 + j).min(39))]);
        }
    }
}

proptest! {
    #[test]
    fn merge_inverts_split(rows in 1usize..50, cols in 1usize..50, n in prop::sample::select(vec![1usize, 7, 16, 32]), seed in any::<u64>()) {
        let q = random_matrix(&mut ChaCha8Rng::seed_from_u64(seed), rows, cols);
        let blocks = split_blocks(&q, n);
        prop_assert_eq!(blocks.len(), rows.div_ceil(n) * cols.div_ceil(n));
        prop_assert_eq!(merge_blocks(&blocks, n, rows, cols).unwrap(), q);
    }
}

#[test]
fn merge_rejects_wrong_block_count() {
    let q = QMat::zeros(16, 16);
    let blocks = split_blocks(&q, 16);
    assert!(matches!(merge_blocks(&blocks, 16, 17, 16), Err(Error::Shape(_))));
}

#[test]
fn invalid_params_rejected() {
    assert!(matches!(CodecParams::new(20, 4, Mode::Pure), Err(Error::InvalidParam(_))));
    assert!(matches!(CodecParams::new(16, 0, Mode::Pure), Err(Error::InvalidParam(_))));
    assert!(matches!(CodecParams::new(16, 17, Mode::Pure), Err(Error::InvalidParam(_))));
    let bad = CodecParams { block_size: 16, rank: 17, mode: Mode::Pure };
    assert!(compress(&smooth_image(8, 8), None, &bad).is_err());
    let full = CodecParams::new(16, 4, Mode::Full).unwrap();
    assert!(matches!(compress(&smooth_image(8, 8), None, &full), Err(Error::MissingModel)));
    let nan_model = PairModel { b_dec: [f64::NAN; 6], ..PairModel::default() };
    assert!(compress(&smooth_image(8, 8), Some(&nan_model), &full).is_err());
}

#[test]
fn pure_full_rank_is_within_one_lsb() {
    let img = RgbImage::from_fn(37, 45, |r, c| [(r * 7 + c * 3) as u8, (r * c) as u8, 255 - (c * 5) as u8]).unwrap();
    let p = CodecParams::new(16, 16, Mode::Pure).unwrap();
    let back = decompress(&compress(&img, None, &p).unwrap(), None).unwrap();
    assert_eq!((back.height(), back.width()), (37, 45));
    for (a, b) in img.samples().iter().zip(back.samples()) {
        assert!(a.abs_diff(*b) <= 1, "{a} vs {b}");
    }
}

#[test]
fn dimensions_survive_every_mode_and_size() {
    let model = trained_model();
    for (h, w) in [(1, 1), (5, 3), (17, 33), (40, 41)] {
        let img = smooth_image(h, w);
        for mode in [Mode::Full, Mode::Pure] {
            for n in [16, 32] {
                let p = CodecParams::new(n, 2, mode).unwrap();
                let c = compress(&img, Some(&model), &p).unwrap();
                let back = decompress(&c, Some(&model)).unwrap();
                assert_eq!((back.height(), back.width()), (h, w), "{mode} n={n}");
            }
        }
    }
}

#[test]
fn containers_are_deterministic_and_order_independent() {
    let model = trained_model();
    let img = smooth_image(48, 70);
    for mode in [Mode::Full, Mode::Pure] {
        let p = CodecParams::new(16, 5, mode).unwrap();
        let a = compress(&img, Some(&model), &p).unwrap().to_bytes();
        let b = compress(&img, Some(&model), &p).unwrap().to_bytes();
        assert_eq!(a, b);
        let seq = FactorizedImage::new(&img, Some(&model), 16, mode, false).unwrap().encode(5).unwrap();
        assert_eq!(seq.to_bytes(), a);
    }
}

#[test]
fn block_permutation_does_not_change_factors() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let blocks: Vec<QMat> = (0..5).map(|_| random_matrix(&mut rng, 16, 16)).collect();
    let forward = factorize_blocks(&blocks, false).unwrap();
    let mut reversed_in = blocks.clone();
    reversed_in.reverse();
    let mut reversed = factorize_blocks(&reversed_in, true).unwrap();
    reversed.reverse();
    assert_eq!(forward, reversed);
}

#[test]
fn container_bytes_round_trip() {
    let p = CodecParams::new(32, 3, Mode::Pure).unwrap();
    let c = compress(&smooth_image(30, 50), None, &p).unwrap();
    let bytes = c.to_bytes();
    assert_eq!(bytes.len(), c.byte_len());
    assert_eq!(&bytes[..4], b"QSVC");
    let back = CompressedContainer::from_bytes(&bytes).unwrap();
    assert_eq!(back, c);
    assert_eq!(back.to_bytes(), bytes);
    assert_eq!(c.header.model_crc, 0);
    let raw = backend_decompress(&c.packed, usize::MAX >> 1).unwrap();
    assert_eq!(raw.len() as u64, c.header.payload_len);
    // 1 x 2 blocks of (2·32·3 quaternions + 3 reals) f32 values
    assert_eq!(raw.len(), 2 * (2 * 32 * 3 * 4 + 3) * 4);
}

#[test]
fn error_and_payload_size_monotone_in_rank() {
    let img = smooth_image(40, 40);
    let prepared = FactorizedImage::new(&img, None, 32, Mode::Pure, true).unwrap();
    let q = to_pure_quaternion(&img);
    let blocks = split_blocks(&q, 32);
    let mut prev_err = vec![f64::INFINITY; blocks.len()];
    let mut prev_len = 0;
    for t in 1..=32 {
        for (k, (f, b)) in prepared.factors.iter().zip(&blocks).enumerate() {
            let err = fullquat::reconstruct(&f.truncate(t).unwrap()).sub(b).unwrap().frobenius_norm();
            assert!(err <= prev_err[k] * (1.0 + 1e-12) + 1e-9, "block {k} t {t}");
            prev_err[k] = err;
        }
        let len = prepared.raw_payload(t).unwrap().len();
        assert!(len > prev_len);
        prev_len = len;
    }
}

#[test]
fn wrong_and_missing_models_rejected() {
    let model = trained_model();
    let mut other = model.clone();
    other.b_dec[0] += 1e-3;
    let c = compress(&smooth_image(20, 20), Some(&model), &CodecParams::new(16, 4, Mode::Full).unwrap()).unwrap();
    assert_eq!(c.header.model_crc, model.checksum());
    assert!(matches!(decompress(&c, Some(&other)), Err(Error::WrongModel { .. })));
    assert!(matches!(decompress(&c, None), Err(Error::MissingModel)));
    assert!(decompress(&c, Some(&model)).is_ok());
}

#[test]
fn pure_mode_needs_no_model() {
    let c = compress(&smooth_image(20, 20), None, &CodecParams::new(16, 4, Mode::Pure).unwrap()).unwrap();
    assert!(decompress(&c, None).is_ok());
    assert!(decompress(&c, Some(&PairModel::default())).is_ok());
}

#[test]
fn corrupt_containers_rejected() {
    let c = compress(&smooth_image(20, 20), None, &CodecParams::new(16, 4, Mode::Pure).unwrap()).unwrap();
    let bytes = c.to_bytes();

    let mut bad_magic = bytes.clone();
    bad_magic[0] = b'X';
    assert!(matches!(CompressedContainer::from_bytes(&bad_magic), Err(Error::BadMagic { .. })));

    assert!(matches!(CompressedContainer::from_bytes(&bytes[..HEADER_LEN - 1]), Err(Error::Corrupt(_))));

    let mut bad_version = bytes.clone();
    bad_version[4] = 9;
    assert!(matches!(CompressedContainer::from_bytes(&bad_version), Err(Error::UnsupportedVersion { .. })));

    let mut bad_rank = bytes.clone();
    bad_rank[9] = 17;
    assert!(matches!(CompressedContainer::from_bytes(&bad_rank), Err(Error::Corrupt(_))));

    let mut bad_len = bytes.clone();
    bad_len[35] ^= 1;
    assert!(matches!(CompressedContainer::from_bytes(&bad_len), Err(Error::Corrupt(_))));

    let truncated = CompressedContainer::from_bytes(&bytes[..bytes.len() - 10]).unwrap();
    assert!(matches!(decompress(&truncated, None), Err(Error::Corrupt(_))));

    let mut flipped = bytes.clone();
    let mid = HEADER_LEN + (bytes.len() - HEADER_LEN) / 2;
    flipped[mid] ^= 0x55;
    let parsed = CompressedContainer::from_bytes(&flipped).unwrap();
    assert!(matches!(decompress(&parsed, None), Err(Error::Corrupt(_))));
}
