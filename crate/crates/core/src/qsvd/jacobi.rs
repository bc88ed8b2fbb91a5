//! One-sided (Hestenes) Jacobi SVD for complex matrices.
//!
//! Columns of `A` are rotated pairwise until they are mutually orthogonal,
//! accumulating the rotations in `V`. The singular values are then the
//! column norms and `U` the normalized columns.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub struct JacobiOptions {
    /// Sweep cap; `None` means `100 * min(rows, cols)`.
    pub max_sweeps: Option<usize>,
    /// A column pair counts as orthogonal once `|a_pᴴ a_q| <= tol * |a_p| |a_q|`.
    pub tol: f64,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        Self {
            max_sweeps: None,
            tol: 1e-12,
        }
    }
}

/// Thin SVD `A = U diag(sigma) Vᴴ` of an `m x n` complex matrix with `m >= n`.
///
/// `sigma` is sorted non-increasing. Columns of `u` belonging to zero singular
/// values are left as zero vectors.
#[derive(Clone, Debug)]
pub struct ComplexSvd<T> {
    pub u: ComplexMatrix<T>,
    pub sigma: Vec<T>,
    pub v: ComplexMatrix<T>,
    pub sweeps: usize,
}

fn dot<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    let mut re = T::zero();
    let mut im = T::zero();
    for (a, b) in x.iter().zip(y) {
        // conj(a) * b
        re += a.re * b.re + a.im * b.im;
        im += a.re * b.im - a.im * b.re;
    }
    Complex::new(re, im)
}

fn norm_sqr<T: Real>(x: &[Complex<T>]) -> T {
    x.iter().map(|z| z.re * z.re + z.im * z.im).sum()
}

/// Applies `[x, y] <- [c x - s conj(e) y, s x + c conj(e) y]`.
fn rotate<T: Real>(x: &mut [Complex<T>], y: &mut [Complex<T>], c: T, s: T, e: Complex<T>) {
    let ec = e.conj();
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let ye = *yi * ec;
        let xo = *xi;
        *xi = xo.scale(c) - ye.scale(s);
        *yi = xo.scale(s) + ye.scale(c);
    }
}

pub fn jacobi_svd<T: Real>(a: &ComplexMatrix<T>, opts: JacobiOptions) -> Result<ComplexSvd<T>> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::Shape(format!("jacobi_svd expects rows >= cols, got {m}x{n}")));
    }
    let tol = T::of(opts.tol).max(T::epsilon() * T::of(4.0));
    let max_sweeps = opts.max_sweeps.unwrap_or(100 * m.min(n).max(1));

    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let mut norms: Vec<T> = (0..n).map(|j| norm_sqr(w.column(j))).collect();
    // Columns at rounding level carry no information; rotating them only
    // drives them towards underflow.
    let fro_sqr: T = norms.iter().copied().sum();
    let floor = fro_sqr * T::epsilon() * T::epsilon();

    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        let mut worst = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha <= floor || beta <= floor {
                    continue;
                }
                let gamma = {
                    let (cp, cq) = (w.column(p), w.column(q));
                    dot(cp, cq)
                };
                let g = gamma.norm();
                let scale = alpha.sqrt() * beta.sqrt();
                let rel = g / scale;
                worst = worst.max(rel);
                if rel <= tol {
                    continue;
                }
                rotated = true;
                let e = gamma.unscale(g);
                let zeta = (beta - alpha) / (g + g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                {
                    let (cp, cq) = w.column_pair_mut(p, q);
                    rotate(cp, cq, c, s, e);
                    norms[p] = norm_sqr(cp);
                    norms[q] = norm_sqr(cq);
                }
                let (vp, vq) = v.column_pair_mut(p, q);
                rotate(vp, vq, c, s, e);
            }
        }
        sweeps += 1;
        if !rotated {
            break;
        }
        if sweeps >= max_sweeps {
            return Err(Error::NoConvergence {
                sweeps,
                residual: worst.as_f64(),
            });
        }
    }

    let mut sigma: Vec<T> = (0..n).map(|j| norm_sqr(w.column(j)).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap_or(std::cmp::Ordering::Equal));

    let mut u = ComplexMatrix::zeros(m, n);
    let mut v_sorted = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let s = sigma[src];
        if s > T::zero() {
            for (o, &x) in u.column_mut(dst).iter_mut().zip(w.column(src)) {
                *o = x.unscale(s);
            }
        }
        v_sorted.column_mut(dst).copy_from_slice(v.column(src));
    }
    sigma = order.iter().map(|&i| sigma[i]).collect();

    Ok(ComplexSvd {
        u,
        sigma,
        v: v_sorted,
        sweeps,
    })
}
