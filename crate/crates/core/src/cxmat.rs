//! Small dense complex matrices.
//!
//! Matrices are square with a handful of rows (two for electromagnetic
//! polarizations). Storage is inline up to 3×3; the 2×2 case has closed-form
//! inverse and determinant.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use smallvec::SmallVec;
use thiserror::Error;

/// Default bound on the 1-norm condition estimate accepted by [`mat_inv`].
pub const DEFAULT_CONDITION_BOUND: f64 = 1e12;

/// Default cap on `Re(value)` accepted by [`diag_exp`].
pub const DEFAULT_EXPONENT_CAP: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("singular matrix (condition estimate {condition:e})")]
    Singular { condition: f64 },
    #[error("exponent {value} exceeds cap {cap}")]
    ExponentOverflow { value: f64, cap: f64 },
    #[error("entries array has {len} elements, expected {dim}²")]
    BadShape { dim: usize, len: usize },
}

type Store = SmallVec<[Complex64; 9]>;

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Store,
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMat{}[", self.dim)?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, ", ")?;
                }
                let z = self[(i, j)];
                write!(f, "{}{:+}i", z.re, z.im)?;
            }
        }
        write!(f, "]")
    }
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        CMat {
            dim,
            data: SmallVec::from_elem(Complex64::new(0.0, 0.0), dim * dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = *v;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self, MatError> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(MatError::BadShape {
                dim,
                len: entries.len(),
            });
        }
        Ok(CMat {
            dim,
            data: entries.iter().copied().collect(),
        })
    }

    pub fn new2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        CMat {
            dim: 2,
            data: SmallVec::from_slice(&[a, b, c, d]),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMat {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[j * n + i] = self.data[i * n + j];
            }
        }
        m
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest off-diagonal entry magnitude.
    pub fn max_off_diag(&self) -> f64 {
        let n = self.dim;
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.data[i * n + j].norm());
                }
            }
        }
        m
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let n = self.dim;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.max_off_diag() <= tol
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn inv(&self) -> Result<CMat, MatError> {
        mat_inv(self)
    }

    pub fn det(&self) -> Complex64 {
        mat_det(self)
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Matrix product.
pub fn mat_mul(a: &CMat, b: &CMat) -> Result<CMat, MatError> {
    if a.dim != b.dim {
        return Err(MatError::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let n = a.dim;
    if n == 2 {
        let (x, y) = (&a.data, &b.data);
        return Ok(CMat::new2(
            x[0] * y[0] + x[1] * y[2],
            x[0] * y[1] + x[1] * y[3],
            x[2] * y[0] + x[3] * y[2],
            x[2] * y[1] + x[3] * y[3],
        ));
    }
    let mut m = CMat::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a.data[i * n + k];
            for j in 0..n {
                m.data[i * n + j] += aik * b.data[k * n + j];
            }
        }
    }
    Ok(m)
}

/// Inverse with the default condition bound.
pub fn mat_inv(a: &CMat) -> Result<CMat, MatError> {
    mat_inv_bounded(a, DEFAULT_CONDITION_BOUND)
}

/// Inverse, failing when the 1-norm condition estimate exceeds `bound`.
pub fn mat_inv_bounded(a: &CMat, bound: f64) -> Result<CMat, MatError> {
    let n = a.dim;
    let inv = if n == 2 {
        let d = &a.data;
        let det = d[0] * d[3] - d[1] * d[2];
        if det == Complex64::new(0.0, 0.0) {
            return Err(MatError::Singular {
                condition: f64::INFINITY,
            });
        }
        let r = det.inv();
        CMat::new2(d[3] * r, -d[1] * r, -d[2] * r, d[0] * r)
    } else {
        gauss_jordan(a)?
    };
    let condition = a.norm1() * inv.norm1();
    if !condition.is_finite() || condition > bound || !inv.is_finite() {
        return Err(MatError::Singular { condition });
    }
    Ok(inv)
}

fn gauss_jordan(a: &CMat) -> Result<CMat, MatError> {
    let n = a.dim;
    let mut m = a.clone();
    let mut inv = CMat::identity(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| m[(p, col)].norm().total_cmp(&m[(q, col)].norm()))
            .unwrap_or(col);
        if m[(pivot, col)].norm() == 0.0 {
            return Err(MatError::Singular {
                condition: f64::INFINITY,
            });
        }
        if pivot != col {
            for j in 0..n {
                m.data.swap(pivot * n + j, col * n + j);
                inv.data.swap(pivot * n + j, col * n + j);
            }
        }
        let p = m[(col, col)].inv();
        for j in 0..n {
            m[(col, j)] *= p;
            inv[(col, j)] *= p;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = m[(i, col)];
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let mc = m[(col, j)];
                let ic = inv[(col, j)];
                m[(i, j)] -= f * mc;
                inv[(i, j)] -= f * ic;
            }
        }
    }
    Ok(inv)
}

/// Determinant: closed form up to 3×3, partial-pivot elimination beyond.
pub fn mat_det(a: &CMat) -> Complex64 {
    let d = &a.data;
    match a.dim {
        1 => d[0],
        2 => d[0] * d[3] - d[1] * d[2],
        3 => {
            d[0] * (d[4] * d[8] - d[5] * d[7]) - d[1] * (d[3] * d[8] - d[5] * d[6])
                + d[2] * (d[3] * d[7] - d[4] * d[6])
        }
        n => {
            let mut m = a.clone();
            let mut det = Complex64::new(1.0, 0.0);
            for col in 0..n {
                let pivot = (col..n)
                    .max_by(|&p, &q| m[(p, col)].norm().total_cmp(&m[(q, col)].norm()))
                    .unwrap_or(col);
                let pv = m[(pivot, col)];
                if pv.norm() == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                if pivot != col {
                    for j in 0..n {
                        m.data.swap(pivot * n + j, col * n + j);
                    }
                    det = -det;
                }
                det *= pv;
                for i in col + 1..n {
                    let f = m[(i, col)] / pv;
                    for j in col..n {
                        let mc = m[(col, j)];
                        m[(i, j)] -= f * mc;
                    }
                }
            }
            det
        }
    }
}

/// `diag(e^{v_1}, …, e^{v_n})` with the default exponent cap.
pub fn diag_exp(values: &[Complex64]) -> Result<CMat, MatError> {
    diag_exp_capped(values, DEFAULT_EXPONENT_CAP)
}

pub fn diag_exp_capped(values: &[Complex64], cap: f64) -> Result<CMat, MatError> {
    if let Some(v) = values.iter().find(|v| v.re > cap || v.re.is_nan()) {
        return Err(MatError::ExponentOverflow { value: v.re, cap });
    }
    Ok(CMat::from_diag(
        &values.iter().map(|v| v.exp()).collect::<Vec<_>>(),
    ))
}

// Operator forms panic on dimension mismatch; library code only combines
// matrices of one polarization count.

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        mat_mul(self, rhs).expect("matrix dimensions agree")
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions agree");
        CMat {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions agree");
        CMat {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        CMat {
            dim: self.dim,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}
