//! Quaternion singular value decomposition `Q = U Σ V^◁`.
//!
//! The decomposition is computed through the complex adjoint: writing
//! `Q = A + B·j` entrywise, the `2N x 2M` complex matrix
//! `[[A, B], [-conj(B), conj(A)]]` has every singular value of `Q` twice.
//! Each pair of complex right singular vectors spans one quaternion right
//! singular vector, which is recovered from the Cayley–Dickson halves and
//! orthonormalized over the quaternions. Left vectors follow from
//! `u = Q v / σ`.
//!
//! Factors are always economy size: `U` is `N x r`, `V` is `M x r` with
//! `r = min(N, M)`.

mod jacobi;

use std::ops::Neg;

use num_complex::Complex;
use num_traits::Num;

pub use jacobi::{jacobi_svd, ComplexSvd, JacobiOptions};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, QuaternionMatrix};
use crate::quaternion::Quaternion;
use crate::scalar::Real;

/// Economy QSVD factors. `sigma` is non-increasing and nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct QsvdFactors<T> {
    pub u: QuaternionMatrix<T>,
    pub sigma: Vec<T>,
    pub v: QuaternionMatrix<T>,
}

/// Leading `t` singular triplets of a [`QsvdFactors`].
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedFactors<T> {
    u: QuaternionMatrix<T>,
    sigma: Vec<T>,
    v: QuaternionMatrix<T>,
}

impl<T: Real> TruncatedFactors<T> {
    /// Validates that `u` is `N x t`, `v` is `M x t` and `sigma` has `t >= 1` entries.
    pub fn new(u: QuaternionMatrix<T>, sigma: Vec<T>, v: QuaternionMatrix<T>) -> Result<Self> {
        let t = sigma.len();
        if t == 0 {
            return Err(Error::InvalidParam("truncation rank must be at least 1".into()));
        }
        if u.cols() != t || v.cols() != t {
            return Err(Error::Shape(format!(
                "factors U {}x{}, V {}x{} inconsistent with {t} singular values",
                u.rows(),
                u.cols(),
                v.rows(),
                v.cols()
            )));
        }
        Ok(Self { u, sigma, v })
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn u(&self) -> &QuaternionMatrix<T> {
        &self.u
    }

    pub fn sigma(&self) -> &[T] {
        &self.sigma
    }

    pub fn v(&self) -> &QuaternionMatrix<T> {
        &self.v
    }

    pub fn cast<U: Real>(&self) -> TruncatedFactors<U> {
        TruncatedFactors {
            u: self.u.cast(),
            sigma: self.sigma.iter().map(|&s| U::of(s.as_f64())).collect(),
            v: self.v.cast(),
        }
    }
}

impl<T: Real> QsvdFactors<T> {
    /// Keeps the `t` largest singular values and their vectors.
    pub fn truncate(&self, t: usize) -> Result<TruncatedFactors<T>> {
        if t == 0 || t > self.sigma.len() {
            return Err(Error::InvalidParam(format!(
                "truncation rank {t} outside 1..={}",
                self.sigma.len()
            )));
        }
        TruncatedFactors::new(
            self.u.leading_columns(t),
            self.sigma[..t].to_vec(),
            self.v.leading_columns(t),
        )
    }

    /// `U Σ V^◁` with all singular values kept.
    pub fn reconstruct(&self) -> QuaternionMatrix<T> {
        product(&self.u, &self.sigma, &self.v)
    }
}

/// `U_t · diag(σ_t) · V_t^◁`.
pub fn reconstruct<T: Real>(f: &TruncatedFactors<T>) -> QuaternionMatrix<T> {
    product(&f.u, &f.sigma, &f.v)
}

fn product<T: Real>(u: &QuaternionMatrix<T>, sigma: &[T], v: &QuaternionMatrix<T>) -> QuaternionMatrix<T> {
    let (n, m, t) = (u.rows(), v.rows(), sigma.len());
    // σ is real, so it commutes and can be folded into the conjugated V rows.
    let vh_scaled = QuaternionMatrix::from_fn(t, m, |k, j| v[(j, k)].conj().scale(sigma[k]));
    let us = QuaternionMatrix::from_fn(n, t, |i, k| u[(i, k)]);
    us.matmul(&vh_scaled).expect("conformable by construction")
}

/// Block matrix `[[A, B], [-conj(B), conj(A)]]` for `Q = A + B·j`.
pub fn complex_adjoint<T: Num + Copy + Neg<Output = T>>(q: &QuaternionMatrix<T>) -> ComplexMatrix<T> {
    let (n, m) = q.shape();
    ComplexMatrix::from_fn(2 * n, 2 * m, |i, j| {
        let (z1, z2) = q[(i % n, j % m)].cayley_dickson_split();
        match (i < n, j < m) {
            (true, true) => z1,
            (true, false) => z2,
            (false, true) => -z2.conj(),
            (false, false) => z1.conj(),
        }
    })
}

pub fn qsvd<T: Real>(q: &QuaternionMatrix<T>) -> Result<QsvdFactors<T>> {
    qsvd_with(q, JacobiOptions::default())
}

pub fn qsvd_with<T: Real>(q: &QuaternionMatrix<T>, opts: JacobiOptions) -> Result<QsvdFactors<T>> {
    if q.rows() == 0 || q.cols() == 0 {
        return Err(Error::InvalidParam(format!("qsvd of an empty {}x{} matrix", q.rows(), q.cols())));
    }
    if !q.is_finite() {
        return Err(Error::NonFinite("qsvd input"));
    }
    let mut f = if q.rows() >= q.cols() {
        qsvd_tall(q, opts)?
    } else {
        let t = qsvd_tall(&q.conj_transpose(), opts)?;
        QsvdFactors {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        }
    };
    normalize_phase(&mut f);
    Ok(f)
}

type QVec<T> = Vec<Quaternion<T>>;

/// `xᴴ y` over the quaternions.
fn qdot<T: Real>(x: &[Quaternion<T>], y: &[Quaternion<T>]) -> Quaternion<T> {
    x.iter().zip(y).fold(Quaternion::zero(), |acc, (&a, &b)| acc + a.conj() * b)
}

fn qnorm<T: Real>(x: &[Quaternion<T>]) -> T {
    x.iter().map(|q| q.norm_sqr()).sum::<T>().sqrt()
}

/// Removes the component of `y` along the unit vector `x`: `y -= x (xᴴ y)`.
fn project_out<T: Real>(y: &mut [Quaternion<T>], x: &[Quaternion<T>]) {
    let c = qdot(x, y);
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi -= xi * c;
    }
}

/// Two passes of modified Gram–Schmidt against an orthonormal set.
fn orthogonalize<T: Real>(y: &mut [Quaternion<T>], basis: &[QVec<T>]) {
    for _ in 0..2 {
        for x in basis {
            project_out(y, x);
        }
    }
}

fn unscale<T: Real>(y: &mut [Quaternion<T>], s: T) {
    let inv = T::one() / s;
    for q in y {
        *q = q.scale(inv);
    }
}

/// Quaternion vector whose adjoint block has `col` as first column.
fn from_adjoint_column<T: Real>(col: &[Complex<T>], len: usize) -> QVec<T> {
    (0..len)
        .map(|i| {
            let top = col[i];
            let bottom = col[len + i];
            // bottom = -conj(x2)  =>  x2 = -conj(bottom)
            Quaternion::new(top.re, top.im, -bottom.re, bottom.im)
        })
        .collect()
}

/// Completes `basis` with standard unit vectors until it holds `want` vectors.
///
/// While the basis is short of `len`, some `e_i` keeps a residual of at least
/// `1/sqrt(len)`, and residuals only shrink as the basis grows, so one pass
/// with a threshold below that bound always finishes.
fn complete_basis<T: Real>(basis: &mut Vec<QVec<T>>, want: usize, len: usize) {
    let threshold = T::of(0.5 / (len as f64).sqrt());
    let mut e = 0;
    while basis.len() < want && e < len {
        let mut y = vec![Quaternion::zero(); len];
        y[e] = Quaternion::one();
        orthogonalize(&mut y, basis);
        let nrm = qnorm(&y);
        if nrm > threshold {
            unscale(&mut y, nrm);
            basis.push(y);
        }
        e += 1;
    }
}

fn qsvd_tall<T: Real>(q: &QuaternionMatrix<T>, opts: JacobiOptions) -> Result<QsvdFactors<T>> {
    let (n, m) = q.shape();
    let svd = jacobi_svd(&complex_adjoint(q), opts)?;
    let sigma_max = svd.sigma[0];
    let cluster_tol = sigma_max * T::of(1e-9);
    let accept = T::of(1e-3);

    // Right singular vectors: walk clusters of (numerically) equal complex
    // singular values and pick quaternion vectors with largest residual.
    let mut right: Vec<QVec<T>> = Vec::with_capacity(m);
    let mut k = 0;
    while k < 2 * m && right.len() < m {
        let mut end = k + 1;
        while end < 2 * m && svd.sigma[end - 1] - svd.sigma[end] <= cluster_tol {
            end += 1;
        }
        let mut pool: Vec<QVec<T>> = (k..end)
            .map(|c| {
                let mut y = from_adjoint_column(svd.v.column(c), m);
                orthogonalize(&mut y, &right);
                y
            })
            .collect();
        while right.len() < m && !pool.is_empty() {
            let (best, best_norm) = pool
                .iter()
                .enumerate()
                .map(|(i, y)| (i, qnorm(y)))
                .fold((0, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best_norm <= accept {
                break;
            }
            let mut y = pool.swap_remove(best);
            orthogonalize(&mut y, &right);
            let nrm = qnorm(&y);
            unscale(&mut y, nrm);
            for other in pool.iter_mut() {
                project_out(other, &y);
            }
            right.push(y);
        }
        k = end;
    }
    complete_basis(&mut right, m, m);

    // Left singular vectors from Q v, re-orthogonalized against their predecessors.
    let null_tol = q.frobenius_norm() * T::epsilon() * T::of(8.0);
    let mut left: Vec<QVec<T>> = Vec::with_capacity(m);
    let mut sigma: Vec<T> = Vec::with_capacity(m);
    let mut missing = Vec::new();
    for (idx, v) in right.iter().enumerate() {
        let mut w = q.mul_vec(v)?;
        orthogonalize(&mut w, &left);
        let s = qnorm(&w);
        if s > null_tol {
            unscale(&mut w, s);
            left.push(w);
            sigma.push(s);
        } else {
            missing.push(idx);
            sigma.push(T::zero());
        }
    }
    let have = left.len();
    complete_basis(&mut left, m, n);
    // Place completed vectors in the slots of the null singular values.
    let mut completed = left.split_off(have).into_iter();
    let mut ordered_left: Vec<QVec<T>> = Vec::with_capacity(m);
    let mut found = left.into_iter();
    for idx in 0..m {
        if missing.first() == Some(&idx) {
            missing.remove(0);
            ordered_left.push(completed.next().expect("basis completion"));
        } else {
            ordered_left.push(found.next().expect("left vector"));
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap_or(std::cmp::Ordering::Equal));

    let u = QuaternionMatrix::from_fn(n, m, |i, j| ordered_left[order[j]][i]);
    let v = QuaternionMatrix::from_fn(m, m, |i, j| right[order[j]][i]);
    let sigma = order.iter().map(|&i| sigma[i]).collect();
    Ok(QsvdFactors { u, sigma, v })
}

/// Right-multiplies each singular vector pair by a unit quaternion so the
/// first non-negligible entry of the left vector is real and positive.
fn normalize_phase<T: Real>(f: &mut QsvdFactors<T>) {
    let floor = T::epsilon().sqrt();
    for j in 0..f.sigma.len() {
        let Some(lead) = (0..f.u.rows()).map(|i| f.u[(i, j)]).find(|e| e.norm() > floor) else {
            continue;
        };
        let p = lead.conj().scale(T::one() / lead.norm());
        for i in 0..f.u.rows() {
            f.u[(i, j)] = f.u[(i, j)] * p;
        }
        for i in 0..f.v.rows() {
            f.v[(i, j)] = f.v[(i, j)] * p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Q = Quaternion<f64>;

    fn random(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> QuaternionMatrix<f64> {
        QuaternionMatrix::from_fn(rows, cols, |_, _| {
            Q::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        })
    }

    fn unitarity_error(u: &QuaternionMatrix<f64>) -> f64 {
        let g = u.conj_transpose().matmul(u).unwrap();
        g.max_abs_diff(&QuaternionMatrix::identity(g.rows()))
    }

    #[test]
    fn adjoint_small_cases() {
        let j = QuaternionMatrix::new(1, 1, vec![Q::j()]).unwrap();
        let a = complex_adjoint(&j);
        assert_eq!(a[(0, 0)], Complex::new(0.0, 0.0));
        assert_eq!(a[(0, 1)], Complex::new(1.0, 0.0));
        assert_eq!(a[(1, 0)], Complex::new(-1.0, 0.0));
        assert_eq!(a[(1, 1)], Complex::new(0.0, 0.0));

        let five = QuaternionMatrix::new(1, 1, vec![Q::real(5.0)]).unwrap();
        let a = complex_adjoint(&five);
        assert_eq!(a, ComplexMatrix::from_fn(2, 2, |i, j| Complex::new(if i == j { 5.0 } else { 0.0 }, 0.0)));
    }

    #[test]
    fn adjoint_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let p = random(&mut rng, 2, 2);
            let q = random(&mut rng, 2, 2);
            let lhs = complex_adjoint(&p.matmul(&q).unwrap());
            let rhs = complex_adjoint(&p).matmul(&complex_adjoint(&q)).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert!((lhs[(i, j)] - rhs[(i, j)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn diagonal_real_matrix() {
        let d = QuaternionMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Q::real(3.0),
            (1, 1) => Q::real(1.0),
            _ => Q::zero(),
        });
        let f = qsvd(&d).unwrap();
        assert!((f.sigma[0] - 3.0).abs() < 1e-14 && (f.sigma[1] - 1.0).abs() < 1e-14);
        let rank1 = reconstruct(&f.truncate(1).unwrap());
        let expected = QuaternionMatrix::from_fn(2, 2, |i, j| if (i, j) == (0, 0) { Q::real(3.0) } else { Q::zero() });
        assert!(rank1.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn zero_matrix() {
        for (n, m) in [(3, 5), (4, 4), (6, 2)] {
            let z = QuaternionMatrix::<f64>::zeros(n, m);
            let f = qsvd(&z).unwrap();
            assert_eq!(f.sigma, vec![0.0; n.min(m)]);
            assert!(unitarity_error(&f.u) < 1e-14);
            assert!(unitarity_error(&f.v) < 1e-14);
            let r = reconstruct(&f.truncate(1).unwrap());
            assert_eq!(r, z);
        }
    }

    #[test]
    fn random_shapes_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (n, m) in [(1, 1), (1, 6), (6, 1), (4, 4), (7, 3), (3, 9), (16, 16)] {
            let q = random(&mut rng, n, m);
            let f = qsvd(&q).unwrap();
            assert_eq!(f.u.shape(), (n, n.min(m)));
            assert_eq!(f.v.shape(), (m, n.min(m)));
            assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]));
            let err = f.reconstruct().sub(&q).unwrap().frobenius_norm();
            assert!(err <= 1e-12 * q.frobenius_norm().max(1.0), "{n}x{m}: {err}");
            assert!(unitarity_error(&f.u) < 1e-12);
            assert!(unitarity_error(&f.v) < 1e-12);
        }
    }

    #[test]
    fn rank_deficient_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random(&mut rng, 8, 2);
        let b = random(&mut rng, 2, 6);
        let q = a.matmul(&b).unwrap();
        let f = qsvd(&q).unwrap();
        assert!(f.sigma[2] < 1e-12 * f.sigma[0]);
        assert!(unitarity_error(&f.u) < 1e-12);
        assert!(unitarity_error(&f.v) < 1e-12);
        assert!(f.reconstruct().max_abs_diff(&q) < 1e-12);
    }

    #[test]
    fn replicate_padded_block() {
        // A 3x2 patch clamped out to 32x32 has rank at most 2 and many null directions.
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let patch = random(&mut rng, 3, 2);
        let q = patch.window_replicate(0, 0, 32, 32);
        let f = qsvd(&q).unwrap();
        assert!(f.sigma[2] < 1e-12 * f.sigma[0]);
        assert!(unitarity_error(&f.u) < 1e-12);
        assert!(unitarity_error(&f.v) < 1e-12);
        assert!(f.reconstruct().max_abs_diff(&q) < 1e-12);
    }

    #[test]
    fn repeated_singular_values() {
        // Identity scaled by a unit quaternion: every singular value is 2.
        let p = Q::new(1.0, 1.0, 1.0, 1.0).scale(0.5);
        let q = QuaternionMatrix::from_fn(5, 5, |i, j| if i == j { p.scale(2.0) } else { Q::zero() });
        let f = qsvd(&q).unwrap();
        assert!(f.sigma.iter().all(|&s| (s - 2.0).abs() < 1e-13));
        assert!(unitarity_error(&f.u) < 1e-13);
        assert!(f.reconstruct().max_abs_diff(&q) < 1e-13);
    }

    #[test]
    fn phase_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let f = qsvd(&random(&mut rng, 6, 4)).unwrap();
        for j in 0..4 {
            let lead = f.u[(0, j)];
            assert!(lead.a > 0.0);
            assert!(lead.b.abs() < 1e-15 && lead.c.abs() < 1e-15 && lead.d.abs() < 1e-15);
        }
    }

    #[test]
    fn truncate_rejects_out_of_range() {
        let f = qsvd(&QuaternionMatrix::<f64>::identity(3)).unwrap();
        assert!(f.truncate(0).is_err());
        assert!(f.truncate(4).is_err());
        assert_eq!(f.truncate(3).unwrap().rank(), 3);
    }

    #[test]
    fn rejects_non_finite() {
        let mut q = QuaternionMatrix::<f64>::identity(2);
        q[(1, 0)] = Q::new(f64::NAN, 0.0, 0.0, 0.0);
        assert!(matches!(qsvd(&q), Err(Error::NonFinite(_))));
    }

    #[test]
    fn f32_decomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let q: QuaternionMatrix<f32> = random(&mut rng, 5, 5).cast();
        let f = qsvd(&q).unwrap();
        assert!(f.reconstruct().max_abs_diff(&q) < 1e-5);
    }

    #[test]
    fn factors_reject_inconsistent_shapes() {
        let u = QuaternionMatrix::<f64>::zeros(4, 2);
        let v = QuaternionMatrix::<f64>::zeros(4, 3);
        assert!(TruncatedFactors::new(u, vec![1.0, 0.5], v).is_err());
    }
}
