use fullquat::{qsvd, reconstruct, QMat};
use rand::Rng;

mod common;
use common::*;

#[test]
fn sigma_matches_adjoint_oracle() {
    let mut rng = rng(21);
    for (n, m) in [(4, 4), (1, 5), (6, 2), (9, 7), (3, 12), (16, 16)] {
        let q = random_qmat(&mut rng, n, m);
        let f = qsvd(&q).unwrap();
        let s = adjoint_singular_values(&q);
        assert_eq!(s.len(), 2 * n.min(m));
        for (k, &sig) in f.sigma.iter().enumerate() {
            // Every singular value appears twice in the adjoint.
            assert!((s[2 * k] - s[2 * k + 1]).abs() <= 1e-10 * s[0]);
            assert!((sig - s[2 * k]).abs() <= 1e-9 * s[0], "{n}x{m} k={k}: {sig} vs {}", s[2 * k]);
        }
    }
}

#[test]
fn factors_unitary_and_reconstructing() {
    let mut rng = rng(22);
    for _ in 0..20 {
        let (n, m) = (rng.gen_range(1..24), rng.gen_range(1..24));
        let q = random_qmat(&mut rng, n, m);
        let f = qsvd(&q).unwrap();
        assert!(unitarity_deviation(&f.u) <= 1e-8);
        assert!(unitarity_deviation(&f.v) <= 1e-8);
        let r = dense_reconstruct(&f.u, &f.sigma, &f.v, f.sigma.len());
        assert!(diff_frobenius(&r, &q) <= 1e-8 * frobenius(&q).max(1.0));
        assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]) && f.sigma.iter().all(|&s| s >= 0.0));
    }
}

#[test]
fn eckart_young_on_8x8() {
    let mut rng = rng(23);
    let q = random_qmat(&mut rng, 8, 8);
    let f = qsvd(&q).unwrap();
    for t in 1..=8 {
        let err = diff_frobenius(&reconstruct(&f.truncate(t).unwrap()), &q);
        let expected = f.sigma[t..].iter().map(|s| s * s).sum::<f64>().sqrt();
        assert!((err - expected).abs() <= 1e-10 * frobenius(&q), "t={t}: {err} vs {expected}");
    }
}

#[test]
fn truncation_error_monotone() {
    let mut rng = rng(24);
    let q = random_qmat(&mut rng, 12, 10);
    let f = qsvd(&q).unwrap();
    let errs: Vec<f64> = (1..=10).map(|t| diff_frobenius(&reconstruct(&f.truncate(t).unwrap()), &q)).collect();
    assert!(errs.windows(2).all(|w| w[0] >= w[1]), "{errs:?}");
}

#[test]
fn truncated_reconstruction_matches_dense_oracle() {
    let mut rng = rng(25);
    let q = random_qmat(&mut rng, 16, 16);
    let f = qsvd(&q).unwrap();
    let got = reconstruct(&f.truncate(4).unwrap());
    let want = dense_reconstruct(&f.u, &f.sigma, &f.v, 4);
    assert!(got.max_abs_diff(&want) < 1e-12);
}

#[test]
fn unit_quaternion_scaling_keeps_sigma() {
    let mut rng = rng(26);
    for m in [1, 3, 8] {
        let q = random_qmat(&mut rng, 1, m);
        let p = random_quat(&mut rng);
        let p = p.scale(1.0 / p.norm());
        let scaled = QMat::from_fn(1, m, |_, j| p * q[(0, j)]);
        let (a, b) = (qsvd(&q).unwrap().sigma, qsvd(&scaled).unwrap().sigma);
        assert!((a[0] - b[0]).abs() < 1e-13);
    }
}

#[test]
fn unitarity_up_to_64() {
    let mut rng = rng(27);
    for n in [32, 48, 64] {
        let q = random_qmat(&mut rng, n, n);
        let f = qsvd(&q).unwrap();
        assert!(unitarity_deviation(&f.u) <= 1e-8);
        assert!(unitarity_deviation(&f.v) <= 1e-8);
    }
}

#[test]
fn zero_matrix_rank_one_is_zero() {
    let z = QMat::zeros(5, 3);
    let f = qsvd(&z).unwrap();
    assert_eq!(reconstruct(&f.truncate(1).unwrap()), z);
    assert!(f.sigma.iter().all(|&s| s == 0.0));
}
