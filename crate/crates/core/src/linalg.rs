//! Fixed-size complex linear algebra for one- and two-qubit operators.
//!
//! Everything here lives on the stack: 2×2 and 4×4 complex matrices,
//! real 3-vectors for spin directions, plus the two eigenvalue routines
//! the rest of the crate needs (closed-form 3×3 symmetric and Jacobi on
//! the real embedding of a 4×4 Hermitian matrix).

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);
const I: Complex = Complex::new(0.0, 1.0);

/// Tolerance on the norm of a measurement direction.
pub const UNIT_TOL: f64 = 1e-12;
/// Absolute tolerance for Hermiticity and positivity checks.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// A real 3-vector. Used for spin directions, polarizations and decay
/// product momenta.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// A direction used to orient a measurement; expected to be unit length.
pub type Direction3 = Vec3;

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub const fn from_array(v: [f64; 3]) -> Self {
        Vec3::new(v[0], v[1], v[2])
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    /// Unit vector along `self`, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(1.0 / n))
    }

    pub fn is_unit(self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOL
    }

    /// Returns `self` if it is a unit vector.
    pub fn require_unit(self) -> Result<Vec3> {
        if self.is_unit() {
            Ok(self)
        } else {
            Err(Error::NonUnitDirection { norm: self.norm() })
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

/// Dense row-major `N×N` complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix<const N: usize>(pub [[Complex; N]; N]);

pub type Mat2 = Matrix<2>;
pub type Mat4 = Matrix<4>;

impl<const N: usize> Matrix<N> {
    pub const fn zero() -> Self {
        Matrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real_diagonal(d: [f64; N]) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = Complex::new(d[i], 0.0);
        }
        m
    }

    pub fn trace(&self) -> Complex {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        self.scale_complex(Complex::new(s, 0.0))
    }

    pub fn scale_complex(&self, s: Complex) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.dagger()) <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `self · other − other · self`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex {
        let mut acc = ZERO;
        for i in 0..N {
            for k in 0..N {
                acc += self.0[i][k] * other.0[k][i];
            }
        }
        acc
    }

    /// Repeated product `self^n`, with `self^0 = I`.
    pub fn powi(&self, n: u32) -> Self {
        let mut out = Self::identity();
        for _ in 0..n {
            out = out * *self;
        }
        out
    }
}

impl Mat4 {
    /// `M^n` for the orders the moment hierarchy needs.
    pub fn pow(&self, n: u32) -> Result<Mat4> {
        if n > 4 {
            return Err(Error::PowerOutOfRange(n));
        }
        Ok(self.powi(n))
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Only the Hermitian part of `self` is used. Computed by cyclic
    /// Jacobi sweeps on the 8×8 real symmetric embedding
    /// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of `self` doubled.
    pub fn hermitian_eigenvalues(&self) -> [f64; 4] {
        let h = (*self + self.dagger()).scale(0.5);
        let mut a = [[0.0f64; 8]; 8];
        for i in 0..4 {
            for j in 0..4 {
                let z = h.0[i][j];
                a[i][j] = z.re;
                a[i + 4][j + 4] = z.re;
                a[i][j + 4] = -z.im;
                a[i + 4][j] = z.im;
            }
        }
        let mut ev = jacobi_symmetric(a);
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[2], ev[4], ev[6]]
    }
}

impl Mat2 {
    /// Eigenvalues of a Hermitian 2×2 matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = (self.0[0][1] + self.0[1][0].conj()) * 0.5;
        let mean = 0.5 * (a + d);
        let r = libm::sqrt(0.25 * (a - d) * (a - d) + b.norm_sqr());
        [mean - r, mean + r]
    }
}

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self += o;
        self
    }
}

impl<const N: usize> AddAssign for Matrix<N> {
    fn add_assign(&mut self, o: Self) {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] += o.0[i][j];
            }
        }
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] -= o.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * o.0[k][j];
                }
            }
        }
        m
    }
}

pub fn pauli_x() -> Mat2 {
    Matrix([[ZERO, ONE], [ONE, ZERO]])
}

pub fn pauli_y() -> Mat2 {
    Matrix([[ZERO, -I], [I, ZERO]])
}

pub fn pauli_z() -> Mat2 {
    Matrix([[ONE, ZERO], [ZERO, -ONE]])
}

/// The three Pauli matrices in `x, y, z` order.
pub fn paulis() -> [Mat2; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// `σ·n` for an arbitrary real vector, without the unit-norm check.
pub fn sigma_dot(n: Vec3) -> Mat2 {
    let (x, y, z) = (n.x, n.y, n.z);
    Matrix([
        [Complex::new(z, 0.0), Complex::new(x, -y)],
        [Complex::new(x, y), Complex::new(-z, 0.0)],
    ])
}

/// `σ·n` for a unit direction `n`.
pub fn pauli_dot(n: Direction3) -> Result<Mat2> {
    Ok(sigma_dot(n.require_unit()?))
}

/// Tensor product `a ⊗ b`, first factor on the high index bit.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    m
}

/// Real 3×3 matrix, row-major.
pub type Real3 = [[f64; 3]; 3];

/// Eigenvalues of a real symmetric 3×3 matrix, descending.
///
/// Closed-form trigonometric solution of the characteristic cubic.
pub fn sym3_eigenvalues(t: &Real3) -> Result<[f64; 3]> {
    let asym = (t[0][1] - t[1][0])
        .abs()
        .max((t[0][2] - t[2][0]).abs())
        .max((t[1][2] - t[2][1]).abs());
    if asym > 1e-12 || !t.iter().flatten().all(|v| v.is_finite()) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let a01 = 0.5 * (t[0][1] + t[1][0]);
    let a02 = 0.5 * (t[0][2] + t[2][0]);
    let a12 = 0.5 * (t[1][2] + t[2][1]);
    let p1 = a01 * a01 + a02 * a02 + a12 * a12;
    let mut ev = if p1 == 0.0 {
        [t[0][0], t[1][1], t[2][2]]
    } else {
        let q = (t[0][0] + t[1][1] + t[2][2]) / 3.0;
        let d0 = t[0][0] - q;
        let d1 = t[1][1] - q;
        let d2 = t[2][2] - q;
        let p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
        let p = libm::sqrt(p2 / 6.0);
        // det((A - qI)/p) / 2
        let det = d0 * (d1 * d2 - a12 * a12) - a01 * (a01 * d2 - a12 * a02)
            + a02 * (a01 * a12 - d1 * a02);
        let r = (det / (2.0 * p * p * p)).clamp(-1.0, 1.0);
        let phi = libm::acos(r) / 3.0;
        let e1 = q + 2.0 * p * libm::cos(phi);
        let e3 = q + 2.0 * p * libm::cos(phi + 2.0 * core::f64::consts::PI / 3.0);
        [e1, 3.0 * q - e1 - e3, e3]
    };
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// Cyclic Jacobi eigenvalue iteration for a real symmetric 8×8 matrix.
fn jacobi_symmetric(mut a: [[f64; 8]; 8]) -> [f64; 8] {
    const N: usize = 8;
    for _sweep in 0..64 {
        let off: f64 = (0..N)
            .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    core::array::from_fn(|i| a[i][i])
}
