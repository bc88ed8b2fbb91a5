//! Quaternion scalars `q = a + bi + cj + dk`.
//!
//! The algebra is implemented for any `T: Num + Copy + Neg`, so the unit
//! relations can be checked exactly over integers or rationals; norms and
//! finiteness checks require [`Real`].

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Num, NumCast};

use crate::scalar::Real;

/// A quaternion with scalar part `a` and vector part `bi + cj + dk`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T> Quaternion<T> {
    pub const fn new(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }

    pub fn to_array(self) -> [T; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn from_array([a, b, c, d]: [T; 4]) -> Self {
        Self { a, b, c, d }
    }
}

impl<T: Num + Copy + Neg<Output = T>> Quaternion<T> {
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::real(T::one())
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    /// Real quaternion `x + 0i + 0j + 0k`.
    pub fn real(x: T) -> Self {
        Self::new(x, T::zero(), T::zero(), T::zero())
    }

    /// Pure quaternion `0 + xi + yj + zk`.
    pub fn pure(x: T, y: T, z: T) -> Self {
        Self::new(T::zero(), x, y, z)
    }

    /// Scalar part `S(q)`.
    pub fn scalar(self) -> T {
        self.a
    }

    /// Vector part `V(q)` as a pure quaternion.
    pub fn vector(self) -> Self {
        Self::new(T::zero(), self.b, self.c, self.d)
    }

    pub fn conj(self) -> Self {
        Self::new(self.a, -self.b, -self.c, -self.d)
    }

    /// `a² + b² + c² + d²`, equal to `S(q · conj(q))`.
    pub fn norm_sqr(self) -> T {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn is_zero(self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    /// Cayley–Dickson form `q = z1 + z2·j` with `z1 = a + bi`, `z2 = c + di`.
    pub fn cayley_dickson_split(self) -> (Complex<T>, Complex<T>) {
        (Complex::new(self.a, self.b), Complex::new(self.c, self.d))
    }

    /// Inverse of [`Quaternion::cayley_dickson_split`].
    pub fn from_cayley_dickson(z1: Complex<T>, z2: Complex<T>) -> Self {
        Self::new(z1.re, z1.im, z2.re, z2.im)
    }
}

impl<T: Real> Quaternion<T> {
    pub fn norm(self) -> T {
        // hypot chain avoids overflow for large components
        self.a.hypot(self.b).hypot(self.c.hypot(self.d))
    }

    pub fn is_finite(self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    /// Multiplicative inverse `conj(q) / |q|²`. Not finite for `q = 0`.
    pub fn inv(self) -> Self {
        self.conj().scale(T::one() / self.norm_sqr())
    }

    pub fn cast<U: Real>(self) -> Quaternion<U> {
        let c = |x: T| -> U { NumCast::from(x).unwrap_or_else(U::nan) };
        Quaternion::new(c(self.a), c(self.b), c(self.c), c(self.d))
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(self, other: Self) -> T {
        let d = self - other;
        d.a.abs().max(d.b.abs()).max(d.c.abs()).max(d.d.abs())
    }
}

impl<T: Num + Copy + Neg<Output = T>> Add for Quaternion<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl<T: Num + Copy + Neg<Output = T>> Sub for Quaternion<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl<T: Num + Copy + Neg<Output = T>> Neg for Quaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }
}

/// Hamilton product: `i² = j² = k² = ijk = -1`, `ij = k`, `jk = i`, `ki = j`.
impl<T: Num + Copy + Neg<Output = T>> Mul for Quaternion<T> {
    type Output = Self;
    fn mul(self, q: Self) -> Self {
        let p = self;
        Self::new(
            p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
            p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
            p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
            p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
        )
    }
}

impl<T: Num + Copy + Neg<Output = T>> AddAssign for Quaternion<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Num + Copy + Neg<Output = T>> SubAssign for Quaternion<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Num + Copy + Neg<Output = T>> MulAssign for Quaternion<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: fmt::Display> fmt::Display for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i + {}j + {}k)", self.a, self.b, self.c, self.d)
    }
}
