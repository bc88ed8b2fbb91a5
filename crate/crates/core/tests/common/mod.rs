//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use fullquat::{PixelPairSample, QMat, Quat, RgbImage};
use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_quat(rng: &mut ChaCha8Rng) -> Quat {
    Quat::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_qmat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> QMat {
    QMat::from_fn(rows, cols, |_, _| random_quat(rng))
}

/// Hamilton product written out component by component.
pub fn hamilton(p: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    let [a1, b1, c1, d1] = p;
    let [a2, b2, c2, d2] = q;
    [
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ]
}

pub fn conj(q: [f64; 4]) -> [f64; 4] {
    [q[0], -q[1], -q[2], -q[3]]
}

/// `A^◁ B` by triple loop.
pub fn gram(a: &QMat, b: &QMat) -> Vec<Vec<[f64; 4]>> {
    (0..a.cols())
        .map(|i| {
            (0..b.cols())
                .map(|j| {
                    let mut acc = [0.0; 4];
                    for k in 0..a.rows() {
                        let p = hamilton(conj(a[(k, i)].to_array()), b[(k, j)].to_array());
                        for c in 0..4 {
                            acc[c] += p[c];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Largest component deviation of `U^◁ U` from the identity.
pub fn unitarity_deviation(u: &QMat) -> f64 {
    let g = gram(u, u);
    let mut worst = 0.0f64;
    for (i, row) in g.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((e[0] - target).abs());
            for c in &e[1..] {
                worst = worst.max(c.abs());
            }
        }
    }
    worst
}

/// `U diag(σ) V^◁` by triple loop, keeping the leading `t` triplets.
pub fn dense_reconstruct(u: &QMat, sigma: &[f64], v: &QMat, t: usize) -> QMat {
    QMat::from_fn(u.rows(), v.rows(), |i, j| {
        let mut acc = [0.0; 4];
        for k in 0..t {
            let us = u[(i, k)].to_array().map(|x| x * sigma[k]);
            let p = hamilton(us, conj(v[(j, k)].to_array()));
            for c in 0..4 {
                acc[c] += p[c];
            }
        }
        Quat::from_array(acc)
    })
}

pub fn frobenius(q: &QMat) -> f64 {
    q.as_slice().iter().map(|e| e.to_array().iter().map(|x| x * x).sum::<f64>()).sum::<f64>().sqrt()
}

pub fn diff_frobenius(a: &QMat, b: &QMat) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (0..4).map(|c| (x.to_array()[c] - y.to_array()[c]).powi(2)).sum::<f64>())
        .sum::<f64>()
        .sqrt()
}

/// `[[A, B], [-conj(B), conj(A)]]` for `Q = A + B j`, `A = a + b i`, `B = c + d i`.
pub fn adjoint_oracle(q: &QMat) -> DMatrix<Complex<f64>> {
    let (n, m) = q.shape();
    DMatrix::from_fn(2 * n, 2 * m, |r, c| {
        let e = q[(r % n, c % m)];
        let a = Complex::new(e.a, e.b);
        let b = Complex::new(e.c, e.d);
        match (r < n, c < m) {
            (true, true) => a,
            (true, false) => b,
            (false, true) => -b.conj(),
            (false, false) => a.conj(),
        }
    })
}

/// Singular values of the adjoint, sorted descending.
pub fn adjoint_singular_values(q: &QMat) -> Vec<f64> {
    let mut s: Vec<f64> = adjoint_oracle(q).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Autoencoder loss evaluated sample by sample from its definition.
pub fn direct_loss(params: &[f64; 58], samples: &[PixelPairSample], lambda: f64) -> f64 {
    let we = |k: usize, j: usize| params[k * 6 + j];
    let be = |k: usize| params[24 + k];
    let wd = |i: usize, k: usize| params[28 + i * 4 + k];
    let bd = |i: usize| params[52 + i];
    let mut sse = 0.0;
    for s in samples {
        let z: Vec<f64> = (0..4).map(|k| (0..6).map(|j| we(k, j) * s.0[j]).sum::<f64>() + be(k)).collect();
        for i in 0..6 {
            let y = (0..4).map(|k| wd(i, k) * z[k]).sum::<f64>() + bd(i);
            sse += (y - s.0[i]).powi(2);
        }
    }
    let penalty: f64 = params[..24].iter().chain(&params[28..52]).map(|w| w * w).sum();
    sse / (6.0 * samples.len() as f64) + lambda * penalty
}

pub fn random_samples(rng: &mut ChaCha8Rng, n: usize) -> Vec<PixelPairSample> {
    (0..n).map(|_| PixelPairSample(std::array::from_fn(|_| rng.gen_range(0.0..1.0)))).collect()
}

/// Points `0.5 + Σ t_k basis_k` on a random 4-D affine subspace inside the unit cube.
pub fn subspace_samples(rng: &mut ChaCha8Rng, n: usize) -> Vec<PixelPairSample> {
    let basis: [[f64; 6]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-0.1..0.1)));
    (0..n)
        .map(|_| {
            let t: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            PixelPairSample(std::array::from_fn(|i| 0.5 + (0..4).map(|k| t[k] * basis[k][i]).sum::<f64>()))
        })
        .collect()
}

pub fn random_image(rng: &mut ChaCha8Rng, h: usize, w: usize) -> RgbImage {
    RgbImage::from_fn(h, w, |_, _| [rng.gen(), rng.gen(), rng.gen()]).unwrap()
}

/// Double loop over `(row, col)` on one channel.
pub fn oracle_mse(a: &RgbImage, b: &RgbImage, k: usize) -> f64 {
    let mut total = 0.0;
    for r in 0..a.height() {
        for c in 0..a.width() {
            let d = a.pixel(r, c)[k] as f64 - b.pixel(r, c)[k] as f64;
            total += d * d;
        }
    }
    total / (a.height() * a.width()) as f64
}

pub fn oracle_psnr(a: &RgbImage, b: &RgbImage) -> f64 {
    let pooled = (0..3).map(|k| oracle_mse(a, b, k)).sum::<f64>() / 3.0;
    10.0 * (255.0f64.powi(2) / pooled).log10()
}

pub fn oracle_ssim(a: &RgbImage, b: &RgbImage) -> f64 {
    let y = |img: &RgbImage, r: usize, c: usize| {
        let [p, q, s] = img.pixel(r, c);
        (299.0 * p as f64 + 587.0 * q as f64 + 114.0 * s as f64) / 1000.0
    };
    let n = (a.height() * a.width()) as f64;
    let coords: Vec<(usize, usize)> = (0..a.height()).flat_map(|r| (0..a.width()).map(move |c| (r, c))).collect();
    let mean = |img: &RgbImage| coords.iter().map(|&(r, c)| y(img, r, c)).sum::<f64>() / n;
    let (mu_a, mu_b) = (mean(a), mean(b));
    let var_a = coords.iter().map(|&(r, c)| (y(a, r, c) - mu_a).powi(2)).sum::<f64>() / n;
    let var_b = coords.iter().map(|&(r, c)| (y(b, r, c) - mu_b).powi(2)).sum::<f64>() / n;
    let cov = coords.iter().map(|&(r, c)| (y(a, r, c) - mu_a) * (y(b, r, c) - mu_b)).sum::<f64>() / n;
    let c1 = (0.01 * 255.0f64).powi(2);
    let c2 = (0.03 * 255.0f64).powi(2);
    let lum = (2.0 * mu_a * mu_b + c1) / (mu_a.powi(2) + mu_b.powi(2) + c1);
    let cs = (2.0 * cov + c2) / (var_a + var_b + c2);
    lum * cs
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
