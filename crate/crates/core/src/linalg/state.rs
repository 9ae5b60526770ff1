use super::eigen::eigvals_hermitian;
use super::matrix::{inner, norm, OperatorMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::tolerances;

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Pure(Vec<C64>),
    Density(OperatorMatrix),
}

/// Pure or mixed state on a tensor product of subsystems.
///
/// `dims` lists subsystem sizes, most significant first, so a boson-spin
/// state has `dims == [M, 2]` and global index `n * 2 + s`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    dims: Vec<usize>,
    repr: Repr,
}

fn total_dim(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::validation("subsystem dimensions must be positive"));
    }
    let mut d: usize = 1;
    for &x in dims {
        d = d.checked_mul(x).ok_or(Error::Capacity {
            requested: usize::MAX,
            max: tolerances::MAX_DIM,
        })?;
    }
    super::matrix::check_capacity(d)?;
    Ok(d)
}

impl QuantumState {
    /// Pure state; the vector must already be normalized.
    pub fn pure(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let d = total_dim(&dims)?;
        if amplitudes.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: amplitudes.len(),
            });
        }
        let nrm = norm(&amplitudes);
        if !nrm.is_finite() || (nrm - 1.0).abs() > tolerances::STATE_NORM {
            return Err(Error::validation(format!("state vector norm {nrm} differs from 1")));
        }
        Ok(Self {
            dims,
            repr: Repr::Pure(amplitudes),
        })
    }

    /// Pure state from an arbitrary nonzero vector, rescaled to unit norm.
    pub fn pure_normalized(dims: Vec<usize>, mut amplitudes: Vec<C64>) -> Result<Self> {
        let nrm = norm(&amplitudes);
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::validation("cannot normalize a zero or non-finite vector"));
        }
        for a in &mut amplitudes {
            *a /= nrm;
        }
        Self::pure(dims, amplitudes)
    }

    /// Mixed state; checks Hermiticity, unit trace and positivity.
    pub fn density(dims: Vec<usize>, rho: OperatorMatrix) -> Result<Self> {
        let d = total_dim(&dims)?;
        if rho.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.dim(),
            });
        }
        if !rho.is_hermitian(tolerances::HERMITIAN_INPUT_REL) {
            return Err(Error::validation("density matrix is not Hermitian"));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > tolerances::DENSITY_TRACE || tr.im.abs() > tolerances::DENSITY_TRACE {
            return Err(Error::validation(format!("density matrix trace {tr} differs from 1")));
        }
        let min = eigvals_hermitian(&rho)?[0];
        if min < tolerances::DENSITY_MIN_EIG {
            return Err(Error::validation(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self {
            dims,
            repr: Repr::Density(rho),
        })
    }

    /// Density matrix that is trusted to be valid (built from valid pieces).
    pub(crate) fn density_unchecked(dims: Vec<usize>, rho: OperatorMatrix) -> Self {
        Self {
            dims,
            repr: Repr::Density(rho),
        }
    }

    /// Computational basis state `|index>`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let d = total_dim(&dims)?;
        if index >= d {
            return Err(Error::range(format!("basis index {index} outside 0..{d}")));
        }
        let mut v = vec![ZERO; d];
        v[index] = C64::new(1.0, 0.0);
        Self::pure(dims, v)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    pub fn as_pure(&self) -> Option<&[C64]> {
        match &self.repr {
            Repr::Pure(v) => Some(v),
            Repr::Density(_) => None,
        }
    }

    pub fn as_density(&self) -> Option<&OperatorMatrix> {
        match &self.repr {
            Repr::Pure(_) => None,
            Repr::Density(r) => Some(r),
        }
    }

    pub fn density_matrix(&self) -> OperatorMatrix {
        match &self.repr {
            Repr::Pure(v) => OperatorMatrix::outer(v, v).expect("dimension already validated"),
            Repr::Density(r) => r.clone(),
        }
    }

    pub fn to_density(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            repr: Repr::Density(self.density_matrix()),
        }
    }

    /// `<psi|A|psi>` or `Tr(rho A)`.
    pub fn expect(&self, op: &OperatorMatrix) -> Result<C64> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.dim(),
            });
        }
        Ok(match &self.repr {
            Repr::Pure(v) => inner(v, &op.apply(v)),
            Repr::Density(r) => {
                let n = r.dim();
                let mut s = ZERO;
                for i in 0..n {
                    for k in 0..n {
                        s += r.get(i, k) * op.get(k, i);
                    }
                }
                s
            }
        })
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        match &self.repr {
            Repr::Pure(_) => 1.0,
            Repr::Density(r) => {
                let n = r.dim();
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += r.get(i, j).norm_sqr();
                    }
                }
                s
            }
        }
    }

    /// Overlap fidelity; for two pure states `|<a|b>|^2`, otherwise `<a|rho|a>`
    /// with at least one side pure.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        match (&self.repr, &other.repr) {
            (Repr::Pure(a), Repr::Pure(b)) => Ok(inner(a, b).norm_sqr()),
            (Repr::Pure(a), Repr::Density(r)) | (Repr::Density(r), Repr::Pure(a)) => Ok(inner(a, &r.apply(a)).re),
            _ => Err(Error::UnsupportedShape(
                "fidelity between two mixed states is not implemented".into(),
            )),
        }
    }

    /// Tensor product `self (x) other`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        total_dim(&dims)?;
        match (&self.repr, &other.repr) {
            (Repr::Pure(a), Repr::Pure(b)) => {
                let v: Vec<C64> = a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect();
                Ok(Self {
                    dims,
                    repr: Repr::Pure(v),
                })
            }
            _ => {
                let rho = self.density_matrix().kron(&other.density_matrix())?;
                Ok(Self::density_unchecked(dims, rho))
            }
        }
    }
}

/// Reduced state of subsystem `keep` (0 or 1) of a bipartite state.
pub fn partial_trace(state: &QuantumState, keep: usize) -> Result<QuantumState> {
    let dims = state.dims();
    if dims.len() != 2 {
        return Err(Error::UnsupportedShape(format!(
            "partial trace needs two subsystems, state has {}",
            dims.len()
        )));
    }
    if keep > 1 {
        return Err(Error::validation(format!("subsystem index {keep} must be 0 or 1")));
    }
    let (da, db) = (dims[0], dims[1]);
    let out_dim = if keep == 0 { da } else { db };
    let mut out = OperatorMatrix::zeros(out_dim)?;
    match &state.repr {
        Repr::Pure(v) => {
            // Reshape to a da x db coefficient matrix C; rho_A = C C†, rho_B = C^T C*.
            for i in 0..out_dim {
                for j in 0..out_dim {
                    let mut s = ZERO;
                    if keep == 0 {
                        for k in 0..db {
                            s += v[i * db + k] * v[j * db + k].conj();
                        }
                    } else {
                        for k in 0..da {
                            s += v[k * db + i] * v[k * db + j].conj();
                        }
                    }
                    out.set(i, j, s);
                }
            }
        }
        Repr::Density(r) => {
            for i in 0..out_dim {
                for j in 0..out_dim {
                    let mut s = ZERO;
                    if keep == 0 {
                        for k in 0..db {
                            s += r.get(i * db + k, j * db + k);
                        }
                    } else {
                        for k in 0..da {
                            s += r.get(k * db + i, k * db + j);
                        }
                    }
                    out.set(i, j, s);
                }
            }
        }
    }
    Ok(QuantumState::density_unchecked(vec![out_dim], out))
}
