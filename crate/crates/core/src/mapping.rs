//! Binary encoding of a truncated oscillator into `N` spin-1/2 qubits.
//!
//! Fock level `n` is stored in the register whose qubit `i` (1-based) holds
//! bit `i - 1` of `n`. A set bit is spin down, so `sigma_z^{(i)} = 1 - 2 b_i`
//! and the Kronecker index of a register equals `n` when qubit `N` is the
//! leftmost factor.

use crate::error::{Error, Result};
use crate::linalg::{pauli, OperatorMatrix, C64};

pub const MAX_QUBITS: usize = 11;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MappingConfig {
    n_qubits: usize,
}

impl MappingConfig {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::validation(format!(
                "n_qubits = {n_qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        Ok(Self { n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn boson_dim(&self) -> usize {
        1 << self.n_qubits
    }
}

/// `op` acting on qubit `i` (1-based), identity elsewhere.
pub fn embed_qubit(cfg: MappingConfig, i: usize, op: &OperatorMatrix) -> Result<OperatorMatrix> {
    let n = cfg.n_qubits;
    if i == 0 || i > n {
        return Err(Error::range(format!("qubit {i} outside 1..={n}")));
    }
    if op.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: op.dim(),
        });
    }
    let left = OperatorMatrix::identity(1 << (n - i))?;
    let right = OperatorMatrix::identity(1 << (i - 1))?;
    left.kron(op)?.kron(&right)
}

/// Applies single-qubit factors `ops[i - 1]` to every qubit `i` at once.
fn word(ops: &[OperatorMatrix]) -> Result<OperatorMatrix> {
    // Most significant qubit is the leftmost Kronecker factor.
    let mut acc = ops[ops.len() - 1].clone();
    for op in ops.iter().rev().skip(1) {
        acc = acc.kron(op)?;
    }
    Ok(acc)
}

/// `-sum_i 2^{i-2} sigma_z^{(i)} + (2^N - 1)/2`, assembled from spin operators.
pub fn number_operator_spin_sum(cfg: MappingConfig) -> Result<OperatorMatrix> {
    let dim = cfg.boson_dim();
    let mut acc = OperatorMatrix::identity(dim)?.scale_real((dim as f64 - 1.0) / 2.0);
    for i in 1..=cfg.n_qubits {
        let weight = 2f64.powi(i as i32 - 2);
        let z = embed_qubit(cfg, i, &pauli::sigma_z())?;
        acc = &acc - &z.scale_real(weight);
    }
    Ok(acc)
}

/// Number operator `diag(0, 1, ..., 2^N - 1)`.
///
/// Built from the spin sum; the result is checked against the diagonal form,
/// which holds exactly because every weight is a dyadic rational.
pub fn number_operator(cfg: MappingConfig) -> Result<OperatorMatrix> {
    let spin = number_operator_spin_sum(cfg)?;
    let dim = cfg.boson_dim();
    let diag: Vec<f64> = (0..dim).map(|n| n as f64).collect();
    let reference = OperatorMatrix::from_real_diagonal(&diag)?;
    if spin != reference {
        return Err(Error::numeric(
            "spin-sum number operator differs from diag(0..2^N-1)",
            0,
        ));
    }
    Ok(spin)
}

/// Binary increment `A+` and decrement `A- = A+†`.
///
/// `A+` is the sum over `k` of words that set bit `k` and clear all lower
/// bits, each requiring bit `k` clear and all lower bits set. The top
/// register `|2^N - 1>` has no such word, so it is annihilated.
pub fn ladder_words(cfg: MappingConfig) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let n = cfg.n_qubits;
    let set_bit = pauli::sigma_minus(); // |down><up| = |1><0| on the bit value
    let clear_bit = pauli::sigma_plus();
    let mut a_plus = OperatorMatrix::zeros(cfg.boson_dim())?;
    for k in 1..=n {
        let ops: Vec<OperatorMatrix> = (1..=n)
            .map(|j| match j.cmp(&k) {
                std::cmp::Ordering::Less => clear_bit.clone(),
                std::cmp::Ordering::Equal => set_bit.clone(),
                std::cmp::Ordering::Greater => pauli::identity(),
            })
            .collect();
        a_plus = &a_plus + &word(&ops)?;
    }
    let a_minus = a_plus.adjoint();
    Ok((a_plus, a_minus))
}

fn sqrt_diagonal(op: &OperatorMatrix, shift: f64) -> Result<OperatorMatrix> {
    let d: Vec<f64> = op.diagonal().iter().map(|z| (z.re + shift).max(0.0).sqrt()).collect();
    OperatorMatrix::from_real_diagonal(&d)
}

/// `a = A- sqrt(Sigma_z)` where `Sigma_z` is the spin-built number operator.
pub fn annihilation_operator(cfg: MappingConfig) -> Result<OperatorMatrix> {
    let (_, a_minus) = ladder_words(cfg)?;
    Ok(a_minus.matmul(&sqrt_diagonal(&number_operator(cfg)?, 0.0)?))
}

/// `a† = A+ sqrt(Sigma_z + 1)`, built independently of [`annihilation_operator`].
pub fn creation_operator(cfg: MappingConfig) -> Result<OperatorMatrix> {
    let (a_plus, _) = ladder_words(cfg)?;
    Ok(a_plus.matmul(&sqrt_diagonal(&number_operator(cfg)?, 1.0)?))
}

/// Canonical truncated annihilation matrix `<m|a|n> = sqrt(n) delta_{m,n-1}`.
pub fn truncated_annihilation(dim: usize) -> Result<OperatorMatrix> {
    OperatorMatrix::from_fn(dim, |m, n| {
        if n == m + 1 {
            C64::new((n as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}
