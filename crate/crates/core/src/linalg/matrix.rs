use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tolerances;

pub type C64 = Complex64;

/// Row count above which products and kernels fan out over the thread pool.
pub(crate) const PAR_THRESHOLD: usize = 96;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Dense complex square matrix stored row-major.
///
/// Every operator in the crate (Hamiltonians, ladder operators, squeezing and
/// displacement unitaries, parity, readout permutations) is one of these.
/// Values are immutable once built; arithmetic returns new matrices.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "OperatorMatrix({}x{})", self.dim, self.dim)?;
        if self.dim <= 8 {
            for i in 0..self.dim {
                let row: Vec<String> = self
                    .row(i)
                    .iter()
                    .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                    .collect();
                writeln!(f, "  [{}]", row.join(", "))?;
            }
        }
        Ok(())
    }
}

pub(crate) fn check_capacity(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::validation("matrix dimension must be at least 1"));
    }
    if dim > tolerances::MAX_DIM {
        return Err(Error::Capacity {
            requested: dim,
            max: tolerances::MAX_DIM,
        });
    }
    Ok(())
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_capacity(dim)?;
        Ok(Self {
            dim,
            data: vec![ZERO; dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        Ok(m)
    }

    pub fn from_diagonal(diag: &[C64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        Ok(m)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        check_capacity(dim)?;
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Ok(Self { dim, data })
    }

    /// Builds from a row-major buffer of length `dim * dim`.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        check_capacity(dim)?;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        check_capacity(dim)?;
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, z: C64) {
        self.data[i * self.dim + j] = z;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        Self { dim: n, data }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Self { dim: n, data }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * z).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Matrix product; errors on mismatched dimensions.
    pub fn try_matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(self.matmul(other))
    }

    /// Matrix product. Panics on mismatched dimensions.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        let n = self.dim;
        if self.is_real() && other.is_real() {
            let a: Vec<f64> = self.data.iter().map(|z| z.re).collect();
            let b: Vec<f64> = other.data.iter().map(|z| z.re).collect();
            let c = real_matmul(&a, &b, n);
            return Self {
                dim: n,
                data: c.into_iter().map(|x| C64::new(x, 0.0)).collect(),
            };
        }
        let mut out = vec![ZERO; n * n];
        let kernel = |(i, out_row): (usize, &mut [C64])| {
            let a_row = &self.data[i * n..(i + 1) * n];
            for (k, &a) in a_row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        };
        if n >= PAR_THRESHOLD {
            out.par_chunks_mut(n).enumerate().for_each(kernel);
        } else {
            out.chunks_mut(n).enumerate().for_each(kernel);
        }
        Self { dim: n, data: out }
    }

    /// `self * v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "vector dimension mismatch");
        let n = self.dim;
        let row_dot = |i: usize| -> C64 { self.data[i * n..(i + 1) * n].iter().zip(v).map(|(&a, &b)| a * b).sum() };
        if n >= 4 * PAR_THRESHOLD {
            (0..n).into_par_iter().map(row_dot).collect()
        } else {
            (0..n).map(row_dot).collect()
        }
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Similarity transform `U self U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// Kronecker product with entry `(i*dimB + k, j*dimB + l) = A[i][j] * B[k][l]`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let (da, db) = (self.dim, other.dim);
        let dim = da.checked_mul(db).ok_or(Error::Capacity {
            requested: usize::MAX,
            max: tolerances::MAX_DIM,
        })?;
        check_capacity(dim)?;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..da {
            for j in 0..da {
                let a = self.data[i * da + j];
                if a == ZERO {
                    continue;
                }
                for k in 0..db {
                    let row = (i * db + k) * dim + j * db;
                    let b_row = &other.data[k * db..(k + 1) * db];
                    for (l, &b) in b_row.iter().enumerate() {
                        data[row + l] = a * b;
                    }
                }
            }
        }
        Ok(Self { dim, data })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |M[i][j] - conj(M[j][i])|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Hermitian within `rel` times the largest entry magnitude.
    pub fn is_hermitian(&self, rel: f64) -> bool {
        self.hermiticity_defect() <= rel * self.max_abs().max(f64::MIN_POSITIVE)
    }

    /// All imaginary parts vanish exactly.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// `max |U†U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let id = Self::identity(self.dim).expect("dimension already validated");
        self.adjoint().matmul(self).max_abs_diff(&id)
    }

    /// Restriction to the leading `k` basis states.
    pub fn leading_block(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim {
            return Err(Error::range(format!("leading block {k} outside 1..={}", self.dim)));
        }
        Self::from_fn(k, |i, j| self.get(i, j))
    }

    /// Embeds into a larger space, padding with zeros.
    pub fn embed(&self, dim: usize) -> Result<Self> {
        if dim < self.dim {
            return Err(Error::range(format!(
                "cannot embed a {}-dim operator into {dim} dimensions",
                self.dim
            )));
        }
        Self::from_fn(dim, |i, j| {
            if i < self.dim && j < self.dim {
                self.get(i, j)
            } else {
                ZERO
            }
        })
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: Self) -> OperatorMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: Self) -> OperatorMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: Self) -> OperatorMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        self.scale_real(-1.0)
    }
}

/// Row-major real product `a * b` of two `n x n` matrices.
pub(crate) fn real_matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    let kernel = |(i, out_row): (usize, &mut [f64])| {
        let a_row = &a[i * n..(i + 1) * n];
        for (k, &x) in a_row.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            let b_row = &b[k * n..(k + 1) * n];
            for (o, &y) in out_row.iter_mut().zip(b_row) {
                *o += x * y;
            }
        }
    };
    if n >= PAR_THRESHOLD {
        out.par_chunks_mut(n).enumerate().for_each(kernel);
    } else {
        out.chunks_mut(n).enumerate().for_each(kernel);
    }
    out
}

/// Euclidean inner product `<u|v>`.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    assert_eq!(u.len(), v.len(), "vector dimension mismatch");
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Single-spin operators in the basis `{|up>, |down>}` with `sigma_z = diag(1, -1)`.
pub mod pauli {
    use super::{OperatorMatrix, C64, I, ONE, ZERO};

    fn two(rows: [[C64; 2]; 2]) -> OperatorMatrix {
        OperatorMatrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).expect("2x2 is always valid")
    }

    pub fn identity() -> OperatorMatrix {
        two([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn sigma_x() -> OperatorMatrix {
        two([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> OperatorMatrix {
        two([[ZERO, -I], [I, ZERO]])
    }

    pub fn sigma_z() -> OperatorMatrix {
        two([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `|up><down|`.
    pub fn sigma_plus() -> OperatorMatrix {
        two([[ZERO, ONE], [ZERO, ZERO]])
    }

    /// `|down><up|`.
    pub fn sigma_minus() -> OperatorMatrix {
        two([[ZERO, ZERO], [ONE, ZERO]])
    }

    /// Index of `|up>` in the spin basis.
    pub const UP: usize = 0;
    /// Index of `|down>` in the spin basis.
    pub const DOWN: usize = 1;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_kron(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
        let (da, db) = (a.dim(), b.dim());
        let mut out = OperatorMatrix::zeros(da * db).unwrap();
        for i in 0..da {
            for j in 0..da {
                for k in 0..db {
                    for l in 0..db {
                        out.set(i * db + k, j * db + l, a.get(i, j) * b.get(k, l));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn kron_identity_and_sigma_z() {
        let i2 = pauli::identity();
        assert_eq!(i2.kron(&i2).unwrap(), OperatorMatrix::identity(4).unwrap());
        let zi = pauli::sigma_z().kron(&i2).unwrap();
        let expected = OperatorMatrix::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]).unwrap();
        assert_eq!(zi, expected);
    }

    #[test]
    fn kron_matches_index_loop() {
        let a = pauli::sigma_plus();
        let b = pauli::sigma_minus();
        assert_eq!(a.kron(&b).unwrap(), brute_kron(&a, &b));
        let c = OperatorMatrix::from_fn(3, |i, j| C64::new(i as f64 - 0.5 * j as f64, (i * j) as f64)).unwrap();
        assert_eq!(c.kron(&a).unwrap(), brute_kron(&c, &a));
    }

    #[test]
    fn kron_rejects_oversized_products() {
        let big = OperatorMatrix::identity(300).unwrap();
        match big.kron(&big) {
            Err(Error::Capacity { requested, .. }) => assert_eq!(requested, 90_000),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli::sigma_x(), pauli::sigma_y(), pauli::sigma_z());
        assert!((&x.matmul(&y) - &z.scale(I)).max_abs() < 1e-15);
        let p = pauli::sigma_plus();
        let m = pauli::sigma_minus();
        assert_eq!(p.adjoint(), m);
        assert!((&(&p + &m) - &x).max_abs() < 1e-15);
        assert!(z.is_hermitian(0.0) && y.is_hermitian(0.0));
        assert!(!p.is_hermitian(1e-12));
    }

    #[test]
    fn parallel_and_serial_products_agree() {
        let n = PAR_THRESHOLD + 3;
        let a = OperatorMatrix::from_fn(n, |i, j| C64::new((i as f64).sin(), (j as f64).cos())).unwrap();
        let b = OperatorMatrix::from_fn(n, |i, j| C64::new((i * j % 7) as f64, 1.0)).unwrap();
        let fast = a.matmul(&b);
        let mut slow = OperatorMatrix::zeros(n).unwrap();
        for i in 0..n {
            for j in 0..n {
                let s: C64 = (0..n).map(|k| a.get(i, k) * b.get(k, j)).sum();
                slow.set(i, j, s);
            }
        }
        assert!(fast.max_abs_diff(&slow) < 1e-9);
    }
}
