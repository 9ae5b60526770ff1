//! Hermitian eigendecomposition.
//!
//! Householder reduction to a real symmetric tridiagonal matrix followed by
//! implicit QL with Wilkinson-style shifts. Real symmetric inputs take an
//! all-real path, which roughly quarters the work for the Hamiltonians built
//! in this crate. A cyclic Jacobi solver is kept for cross-checking.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use rayon::prelude::*;

use super::matrix::{real_matmul, OperatorMatrix, C64, PAR_THRESHOLD, ZERO};
use crate::error::{Error, Result};
use crate::tolerances;

/// Sweeps of implicit QL allowed per eigenvalue.
const QL_MAX_ITER: usize = 60;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian operator, sorted by ascending eigenvalue.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Column `j` is the normalized eigenvector for `values[j]`.
    pub vectors: OperatorMatrix,
}

impl Eigen {
    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.vectors.column(j)
    }

    /// Reassembles `V diag(f(values)) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> OperatorMatrix {
        let n = self.values.len();
        let fv: Vec<C64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        if v.is_real() {
            // Two real products instead of one complex one.
            let vr: Vec<f64> = v.as_slice().iter().map(|z| z.re).collect();
            let vt: Vec<f64> = v.transpose().as_slice().iter().map(|z| z.re).collect();
            let scaled = |part: fn(C64) -> f64| -> Vec<f64> {
                let mut m = vr.clone();
                for row in m.chunks_mut(n) {
                    for (x, z) in row.iter_mut().zip(&fv) {
                        *x *= part(*z);
                    }
                }
                real_matmul(&m, &vt, n)
            };
            let re = scaled(|z| z.re);
            let data = if fv.iter().all(|z| z.im == 0.0) {
                re.into_iter().map(|x| C64::new(x, 0.0)).collect()
            } else {
                let im = scaled(|z| z.im);
                re.into_iter().zip(im).map(|(a, b)| C64::new(a, b)).collect()
            };
            return OperatorMatrix::from_row_major(n, data).expect("dimension already validated");
        }
        let scaled = OperatorMatrix::from_fn(n, |i, j| v.get(i, j) * fv[j]).expect("dimension already validated");
        scaled.matmul(&v.adjoint())
    }

    pub fn reconstruct(&self) -> OperatorMatrix {
        self.reconstruct_with(|x| C64::new(x, 0.0))
    }
}

pub(crate) trait Field:
    Copy
    + Send
    + Sync
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    fn zero() -> Self;
    fn one() -> Self;
    fn conj(self) -> Self;
    fn abs(self) -> f64;
    fn norm_sqr(self) -> f64;
    fn re(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn into_c64(self) -> C64;
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn conj(self) -> Self {
        self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn re(self) -> f64 {
        self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn into_c64(self) -> C64 {
        C64::new(self, 0.0)
    }
}

impl Field for C64 {
    fn zero() -> Self {
        ZERO
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn conj(self) -> Self {
        C64::conj(&self)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn norm_sqr(self) -> f64 {
        C64::norm_sqr(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn into_c64(self) -> C64 {
        self
    }
}

struct Tridiagonal<F> {
    diag: Vec<f64>,
    off: Vec<f64>,
    /// Diagonal unitary turning the complex subdiagonal into `off`.
    phases: Vec<F>,
    /// Householder vectors `v` with `tau`; reflector `k` acts on indices `k+1..`.
    reflectors: Vec<(Vec<F>, f64)>,
}

fn tridiagonalize<F: Field>(mut a: Vec<F>, n: usize) -> Tridiagonal<F> {
    let mut sub = vec![F::zero(); n.saturating_sub(1)];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut v: Vec<F> = (0..m).map(|i| a[(k + 1 + i) * n + k]).collect();
        let alpha = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let tail = v[1..].iter().map(|x| x.norm_sqr()).sum::<f64>();
        if alpha == 0.0 || tail == 0.0 {
            sub[k] = v[0];
            reflectors.push((Vec::new(), 0.0));
            continue;
        }
        let x0 = v[0];
        let phase = if x0.abs() == 0.0 {
            F::one()
        } else {
            x0.scale(1.0 / x0.abs())
        };
        let beta = -phase.scale(alpha);
        v[0] = x0 - beta;
        let tau = 2.0 / v.iter().map(|x| x.norm_sqr()).sum::<f64>();

        // p = tau * B v over the trailing block B = a[k+1.., k+1..].
        let off = k + 1;
        let row_dot = |i: usize| -> F {
            let row = &a[(off + i) * n + off..(off + i) * n + n];
            let mut s = F::zero();
            for (b, &vj) in row.iter().zip(&v) {
                s += *b * vj;
            }
            s.scale(tau)
        };
        let p: Vec<F> = if m >= PAR_THRESHOLD {
            (0..m).into_par_iter().map(row_dot).collect()
        } else {
            (0..m).map(row_dot).collect()
        };
        let mut vp = F::zero();
        for (vi, pi) in v.iter().zip(&p) {
            vp += vi.conj() * *pi;
        }
        let kk = vp.re() * tau * 0.5;
        let q: Vec<F> = p.iter().zip(&v).map(|(&pi, &vi)| pi - vi.scale(kk)).collect();

        let update = |(i, row): (usize, &mut [F])| {
            let (vi, qi) = (v[i], q[i]);
            let seg = &mut row[off..];
            for j in 0..m {
                seg[j] -= vi * q[j].conj() + qi * v[j].conj();
            }
        };
        let block = &mut a[off * n..];
        if m >= PAR_THRESHOLD {
            block.par_chunks_mut(n).enumerate().for_each(update);
        } else {
            block.chunks_mut(n).enumerate().for_each(update);
        }
        sub[k] = beta;
        reflectors.push((v, tau));
    }
    if n >= 2 {
        sub[n - 2] = a[(n - 1) * n + n - 2];
    }
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re()).collect();
    let mut phases = vec![F::one(); n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for k in 0..n.saturating_sub(1) {
        let mag = sub[k].abs();
        off[k] = mag;
        phases[k + 1] = if mag == 0.0 {
            phases[k]
        } else {
            phases[k] * sub[k].scale(1.0 / mag)
        };
    }
    Tridiagonal {
        diag,
        off,
        phases,
        reflectors,
    }
}

/// Implicit QL on a symmetric tridiagonal matrix. `d` receives the
/// eigenvalues; when `z` is given (`n x n`, initially the identity) it
/// accumulates the rotations so that row `j` is eigenvector `j`.
fn tql(d: &mut [f64], off: &[f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let mut e = off.to_vec();
    e.push(0.0);
    let mut rotations: Vec<(usize, f64, f64)> = Vec::with_capacity(n);
    // Absolute deflation floor at the backward-error level of the reduction.
    // The relative test alone stalls on clusters of numerically zero
    // eigenvalues.
    let scale = (0..n)
        .map(|i| d[i].abs() + e[i].abs() + if i > 0 { e[i - 1].abs() } else { 0.0 })
        .fold(0.0, f64::max);
    let floor = f64::EPSILON * scale;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::numeric(
                    format!("tridiagonal QL did not converge for eigenvalue {l}"),
                    iter,
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0_f64, 1.0_f64, 0.0_f64);
            let mut deflated = false;
            rotations.clear();
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                rotations.push((i, c, s));
            }
            if let Some(z) = z.as_deref_mut() {
                apply_rotations(z, n, &rotations);
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Applies a QL sweep to the accumulated transform `zt`, stored with
/// `zt[j * n + k]` = component `k` of basis vector `j`. Each rotation mixes
/// two contiguous rows, so the inner loop vectorizes.
fn apply_rotations(zt: &mut [f64], n: usize, rotations: &[(usize, f64, f64)]) {
    for &(i, c, s) in rotations {
        let (lo, hi) = zt.split_at_mut((i + 1) * n);
        let row_i = &mut lo[i * n..];
        let row_j = &mut hi[..n];
        for (x, y) in row_i.iter_mut().zip(row_j.iter_mut()) {
            let f = *y;
            *y = s * *x + c * f;
            *x = c * *x - s * f;
        }
    }
}

fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx
}

fn solve<F: Field>(a: Vec<F>, n: usize) -> Result<Eigen> {
    let tri = tridiagonalize(a, n);
    let mut d = tri.diag.clone();
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql(&mut d, &tri.off, Some(&mut z))?;
    let order = sorted_order(&d);

    // Rows of `w` are eigenvectors; each one is back-transformed independently.
    let phases = &tri.phases;
    let reflectors = &tri.reflectors;
    let back = |&j: &usize| -> Vec<F> {
        let mut w: Vec<F> = (0..n).map(|k| phases[k].scale(z[j * n + k])).collect();
        for (k, (v, tau)) in reflectors.iter().enumerate().rev() {
            if v.is_empty() {
                continue;
            }
            let seg = &mut w[k + 1..];
            let mut dot = F::zero();
            for (vi, wi) in v.iter().zip(seg.iter()) {
                dot += vi.conj() * *wi;
            }
            let dot = dot.scale(*tau);
            for (wi, vi) in seg.iter_mut().zip(v) {
                *wi -= *vi * dot;
            }
        }
        w
    };
    let rows: Vec<Vec<F>> = if n >= PAR_THRESHOLD {
        order.par_iter().map(back).collect()
    } else {
        order.iter().map(back).collect()
    };
    let values: Vec<f64> = order.iter().map(|&j| d[j]).collect();
    let mut data = vec![ZERO; n * n];
    for (col, w) in rows.iter().enumerate() {
        for (row, x) in w.iter().enumerate() {
            data[row * n + col] = x.into_c64();
        }
    }
    Ok(Eigen {
        values,
        vectors: OperatorMatrix::from_row_major(n, data)?,
    })
}

fn check_input(h: &OperatorMatrix) -> Result<()> {
    if h.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::validation("operator has non-finite entries"));
    }
    if !h.is_hermitian(tolerances::HERMITIAN_INPUT_REL) {
        return Err(Error::validation(format!(
            "operator is not Hermitian (defect {:.3e})",
            h.hermiticity_defect()
        )));
    }
    Ok(())
}

/// Full eigendecomposition of a Hermitian operator.
pub fn eig_hermitian(h: &OperatorMatrix) -> Result<Eigen> {
    check_input(h)?;
    let n = h.dim();
    if h.is_real() {
        let a: Vec<f64> = h.as_slice().iter().map(|z| z.re).collect();
        solve(a, n)
    } else {
        solve(h.as_slice().to_vec(), n)
    }
}

/// Eigenvalues only, ascending.
pub fn eigvals_hermitian(h: &OperatorMatrix) -> Result<Vec<f64>> {
    check_input(h)?;
    let n = h.dim();
    let tri = if h.is_real() {
        let a: Vec<f64> = h.as_slice().iter().map(|z| z.re).collect();
        let t = tridiagonalize(a, n);
        (t.diag, t.off)
    } else {
        let t = tridiagonalize(h.as_slice().to_vec(), n);
        (t.diag, t.off)
    };
    let (mut d, off) = tri;
    tql(&mut d, &off, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Cyclic complex Jacobi; slow but simple. Used as an independent reference.
pub fn eig_hermitian_jacobi(h: &OperatorMatrix) -> Result<Eigen> {
    check_input(h)?;
    let n = h.dim();
    let mut a: Vec<C64> = h.as_slice().to_vec();
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = C64::new(1.0, 0.0);
    }
    let scale = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut sweeps = 0;
    loop {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-14 * scale {
            break;
        }
        sweeps += 1;
        if sweeps > JACOBI_MAX_SWEEPS {
            return Err(Error::numeric("Jacobi eigensolver did not converge", sweeps));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let ph = apq / mag;
                let zeta = (a[q * n + q].re - a[p * n + p].re) / (2.0 * mag);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let emi = ph.conj();
                // U restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
                let (upp, upq, uqp, uqq) = (C64::new(c, 0.0), C64::new(s, 0.0), -emi * s, emi * c);
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = akp * upp + akq * uqp;
                    a[k * n + q] = akp * upq + akq * uqq;
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = vkp * upp + vkq * uqp;
                    v[k * n + q] = vkp * upq + vkq * uqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = upp.conj() * apk + uqp.conj() * aqk;
                    a[q * n + k] = upq.conj() * apk + uqq.conj() * aqk;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
            }
        }
    }
    let d: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    let order = sorted_order(&d);
    let values = order.iter().map(|&j| d[j]).collect();
    let vectors = OperatorMatrix::from_fn(n, |i, c| v[i * n + order[c]])?;
    Ok(Eigen { values, vectors })
}

/// `exp(-i t H)` for Hermitian `H`, through its eigendecomposition.
pub fn expm_hermitian_generator(h: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    if !t.is_finite() {
        return Err(Error::validation("evolution time must be finite"));
    }
    let e = eig_hermitian(h)?;
    Ok(e.reconstruct_with(|x| C64::from_polar(1.0, -t * x)))
}

/// `exp(A)` for anti-Hermitian `A` (so the result is unitary).
pub fn expm_anti_hermitian(a: &OperatorMatrix) -> Result<OperatorMatrix> {
    // A = -i H with H = i A Hermitian, so exp(A) = exp(-i H).
    let h = a.scale(C64::new(0.0, 1.0));
    let h = (&h + &h.adjoint()).scale_real(0.5);
    expm_hermitian_generator(&h, 1.0)
}

/// `exp(G)` for anti-Hermitian `G` given a diagonal unitary gauge `u` such
/// that `-i u† G u` is real; see [`GaugedGenerator`].
pub fn expm_anti_hermitian_gauged(g: &OperatorMatrix, gauge: &[C64]) -> Result<OperatorMatrix> {
    Ok(GaugedGenerator::new(g, gauge)?.matrix(1.0))
}

/// Spectral form of an anti-Hermitian generator `G = u (i K) u†` with `u`
/// a diagonal phase gauge and `K` real symmetric. Applying `exp(t G)` to a
/// vector costs two real matrix-vector products once `K` is diagonalized.
#[derive(Clone, Debug)]
pub struct GaugedGenerator {
    gauge: Vec<C64>,
    values: Vec<f64>,
    /// Row-major `n x n`; column `j` is eigenvector `j` of `K`.
    vectors: Vec<f64>,
}

impl GaugedGenerator {
    pub fn new(g: &OperatorMatrix, gauge: &[C64]) -> Result<Self> {
        let n = g.dim();
        if gauge.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: gauge.len(),
            });
        }
        let minus_i = C64::new(0.0, -1.0);
        let mut k = Vec::with_capacity(n * n);
        let mut worst_im = 0.0_f64;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let z = minus_i * gauge[i].conj() * g.get(i, j) * gauge[j];
                worst_im = worst_im.max(z.im.abs());
                worst = worst.max(z.norm());
                k.push(z.re);
            }
        }
        if worst_im > 1e-12 * worst.max(f64::MIN_POSITIVE) {
            return Err(Error::validation("gauge does not make the generator real"));
        }
        let sym = OperatorMatrix::from_row_major(n, k.iter().map(|&x| C64::new(x, 0.0)).collect())?;
        check_input(&sym)?;
        let e = solve(k, n)?;
        Ok(Self {
            gauge: gauge.to_vec(),
            values: e.values,
            vectors: e.vectors.as_slice().iter().map(|z| z.re).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.gauge.len()
    }

    /// `exp(t G) v`.
    pub fn apply(&self, t: f64, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(v.len(), n, "vector dimension mismatch");
        let w: Vec<C64> = v.iter().zip(&self.gauge).map(|(x, u)| u.conj() * x).collect();
        let vecs = &self.vectors;
        let project = |j: usize| -> C64 {
            let mut s = ZERO;
            for (i, wi) in w.iter().enumerate() {
                s += *wi * vecs[i * n + j];
            }
            s * C64::from_polar(1.0, t * self.values[j])
        };
        let c: Vec<C64> = if n >= 4 * PAR_THRESHOLD {
            (0..n).into_par_iter().map(project).collect()
        } else {
            (0..n).map(project).collect()
        };
        let expand = |i: usize| -> C64 {
            let row = &vecs[i * n..(i + 1) * n];
            let mut s = ZERO;
            for (x, cj) in row.iter().zip(&c) {
                s += *cj * *x;
            }
            s * self.gauge[i]
        };
        if n >= 4 * PAR_THRESHOLD {
            (0..n).into_par_iter().map(expand).collect()
        } else {
            (0..n).map(expand).collect()
        }
    }

    /// `exp(t G)` as a matrix.
    pub fn matrix(&self, t: f64) -> OperatorMatrix {
        let n = self.dim();
        let e = Eigen {
            values: self.values.clone(),
            vectors: OperatorMatrix::from_row_major(n, self.vectors.iter().map(|&x| C64::new(x, 0.0)).collect())
                .expect("dimension already validated"),
        };
        let inner = e.reconstruct_with(|x| C64::from_polar(1.0, t * x));
        OperatorMatrix::from_fn(n, |i, j| self.gauge[i] * inner.get(i, j) * self.gauge[j].conj())
            .expect("dimension already validated")
    }
}
