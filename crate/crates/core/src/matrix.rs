//! Dense quaternion and complex matrices.
//!
//! [`QuaternionMatrix`] is stored row-major; the container format relies on
//! that linearization. [`ComplexMatrix`] is column-major because its only
//! heavy consumer, the one-sided Jacobi SVD, works on whole columns.

use std::ops::{Index, IndexMut, Neg};

use num_complex::Complex;
use num_traits::Num;

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct QuaternionMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion<T>>,
}

impl<T> QuaternionMatrix<T> {
    /// Wraps row-major `data`; its length must equal `rows * cols`.
    pub fn new(rows: usize, cols: usize, data: Vec<Quaternion<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Quaternion<T>] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Quaternion<T>> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Quaternion<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

impl<T: Num + Copy + Neg<Output = T>> QuaternionMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Quaternion::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Quaternion::one() } else { Quaternion::zero() })
    }

    /// `A^◁`: transpose with entrywise conjugation.
    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn column(&self, j: usize) -> Vec<Quaternion<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Matrix product `self · rhs`, left factor kept on the left in every entry product.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let lhs_row = self.row(i);
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &l) in lhs_row.iter().enumerate() {
                if l.is_zero() {
                    continue;
                }
                for (o, &r) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += l * r;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self · x`.
    pub fn mul_vec(&self, x: &[Quaternion<T>]) -> Result<Vec<Quaternion<T>>> {
        if x.len() != self.cols {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by a vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Quaternion::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::Shape(format!(
                "cannot subtract {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    /// Leading `cols` columns.
    pub fn leading_columns(&self, cols: usize) -> Self {
        assert!(cols <= self.cols, "requested {cols} of {} columns", self.cols);
        Self::from_fn(self.rows, cols, |i, j| self[(i, j)])
    }

    /// Copy of the `rows x cols` window starting at `(r0, c0)`; coordinates
    /// past the edge are clamped to the last row/column.
    pub fn window_replicate(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| {
            let r = (r0 + i).min(self.rows - 1);
            let c = (c0 + j).min(self.cols - 1);
            self[(r, c)]
        })
    }
}

impl<T: Real> QuaternionMatrix<T> {
    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|q| q.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }

    pub fn cast<U: Real>(&self) -> QuaternionMatrix<U> {
        QuaternionMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|q| q.cast()).collect(),
        }
    }

    /// Largest absolute component difference between two same-shaped matrices.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a.max_abs_diff(b))
            .fold(T::zero(), T::max)
    }
}

impl<T> Index<(usize, usize)> for QuaternionMatrix<T> {
    type Output = Quaternion<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for QuaternionMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Dense complex matrix, column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Num + Copy + Neg<Output = T>> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[Complex<T>] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [Complex<T>] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Mutable views of two distinct columns.
    pub fn column_pair_mut(&mut self, p: usize, q: usize) -> (&mut [Complex<T>], &mut [Complex<T>]) {
        assert!(p < q && q < self.cols);
        let (head, tail) = self.data.split_at_mut(q * self.rows);
        (&mut head[p * self.rows..(p + 1) * self.rows], &mut tail[..self.rows])
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            for k in 0..self.cols {
                let r = rhs[(k, j)];
                let lhs = self.column(k);
                for (o, &l) in out.column_mut(j).iter_mut().zip(lhs) {
                    *o = *o + l * r;
                }
            }
        }
        Ok(out)
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[j * self.rows + i]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[j * self.rows + i]
    }
}
