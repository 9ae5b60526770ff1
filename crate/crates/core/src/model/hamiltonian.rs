//! Hamiltonian builders on the boson (x) spin space, boson factor first.

use super::boson;
use super::frame::squeezed_frame;
use super::ModelParams;
use crate::error::{Error, Result};
use crate::linalg::{pauli, OperatorMatrix, C64};
use crate::mapping::{embed_qubit, MappingConfig};

/// `op (x) I_2`.
pub fn on_boson(op: &OperatorMatrix) -> Result<OperatorMatrix> {
    op.kron(&pauli::identity())
}

/// `I_m (x) op`.
pub fn on_spin(m: usize, op: &OperatorMatrix) -> Result<OperatorMatrix> {
    OperatorMatrix::identity(m)?.kron(op)
}

fn square_of_position(m: usize) -> Result<OperatorMatrix> {
    let x = boson::position_sum(m)?;
    Ok(x.matmul(&x))
}

/// `(Omega/2) sigma_z + omega_b a†a + lambda_b (a + a†) sigma_x`.
fn rabi_like(m: usize, big_omega: f64, omega_b: f64, lambda_b: f64) -> Result<OperatorMatrix> {
    let spin = on_spin(m, &pauli::sigma_z())?.scale_real(big_omega / 2.0);
    let field = on_boson(&boson::number(m)?)?.scale_real(omega_b);
    let coupling = boson::position_sum(m)?.kron(&pauli::sigma_x())?.scale_real(lambda_b);
    Ok(&(&spin + &field) + &coupling)
}

pub fn build_rabi(p: &ModelParams) -> Result<OperatorMatrix> {
    p.validate()?;
    rabi_like(p.boson_dim, p.big_omega(), p.omega, p.lambda())
}

/// `(alpha lambda^2 / Omega) (a + a†)^2`.
pub fn build_a2_term(p: &ModelParams) -> Result<OperatorMatrix> {
    p.validate()?;
    let k = p.alpha * p.lambda() * p.lambda() / p.big_omega();
    Ok(on_boson(&square_of_position(p.boson_dim)?)?.scale_real(k))
}

/// `-xi (a + a†)^2`.
pub fn build_antisqueezing_term(p: &ModelParams) -> Result<OperatorMatrix> {
    p.validate()?;
    Ok(on_boson(&square_of_position(p.boson_dim)?)?.scale_real(-p.xi()))
}

pub fn build_total(p: &ModelParams) -> Result<OperatorMatrix> {
    let h = build_rabi(p)?;
    let quad = p.alpha * p.lambda() * p.lambda() / p.big_omega() - p.xi();
    if quad == 0.0 {
        return Ok(h);
    }
    let q = on_boson(&square_of_position(p.boson_dim)?)?.scale_real(quad);
    Ok(&h + &q)
}

/// Squeezed-frame Hamiltonian including the constant `C_s`.
pub fn build_hs(p: &ModelParams) -> Result<OperatorMatrix> {
    build_hs_with(p, true)
}

pub fn build_hs_with(p: &ModelParams, include_constant: bool) -> Result<OperatorMatrix> {
    p.validate()?;
    let f = squeezed_frame(p).stable()?;
    let h = rabi_like(p.boson_dim, p.big_omega(), f.omega_s, f.lambda_s)?;
    if include_constant && f.c_s != 0.0 {
        let c = OperatorMatrix::identity(h.dim())?.scale_real(f.c_s);
        Ok(&h + &c)
    } else {
        Ok(h)
    }
}

/// `S(r) (x) I_2` for the frame squeezing `r_tilde` of `p`.
pub fn frame_squeezing(p: &ModelParams) -> Result<OperatorMatrix> {
    let f = squeezed_frame(p).stable()?;
    on_boson(&boson::squeezing_operator(f.r_tilde, p.boson_dim)?)
}

/// `S(r) H_s S(r)†`: the squeezed-frame Hamiltonian carried back to the lab frame.
pub fn hs_in_lab_frame(p: &ModelParams) -> Result<OperatorMatrix> {
    let s = frame_squeezing(p)?;
    Ok(build_hs(p)?.conjugate_by(&s))
}

/// Excitation-number parity `exp(i pi N)` with `N = a†a + (sigma_z + 1)/2`.
pub fn parity_operator(m: usize) -> Result<OperatorMatrix> {
    let d: Vec<f64> = (0..m)
        .flat_map(|n| {
            [pauli::UP, pauli::DOWN].map(move |s| {
                let excitations = n + usize::from(s == pauli::UP);
                if excitations % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            })
        })
        .collect();
    OperatorMatrix::from_real_diagonal(&d)
}

/// `sum_i pi w_i sigma_z^{(i)} + sum_{i<j} (pi/2) J_ij sigma_z^{(i)} sigma_z^{(j)}`.
///
/// `shifts[i]` belongs to qubit `i + 1` in the register convention of
/// [`crate::mapping`].
#[allow(clippy::needless_range_loop)]
pub fn build_nmr_hamiltonian(shifts: &[f64], couplings: &[Vec<f64>]) -> Result<OperatorMatrix> {
    let n = shifts.len();
    if couplings.len() != n || couplings.iter().any(|row| row.len() != n) {
        return Err(Error::validation(format!("couplings must be a {n}x{n} matrix")));
    }
    for i in 0..n {
        if couplings[i][i] != 0.0 {
            return Err(Error::validation("couplings must have a zero diagonal"));
        }
        for j in 0..i {
            if couplings[i][j] != couplings[j][i] {
                return Err(Error::validation(format!("couplings not symmetric at ({i}, {j})")));
            }
        }
    }
    let cfg = MappingConfig::new(n)?;
    let dim = cfg.boson_dim();
    // z-eigenvalue of qubit i on register index k is 1 - 2 * bit.
    let z = |k: usize, i: usize| if (k >> i) & 1 == 0 { 1.0 } else { -1.0 };
    let diag: Vec<f64> = (0..dim)
        .map(|k| {
            let mut e = 0.0;
            for i in 0..n {
                e += std::f64::consts::PI * shifts[i] * z(k, i);
                for j in i + 1..n {
                    e += std::f64::consts::FRAC_PI_2 * couplings[i][j] * z(k, i) * z(k, j);
                }
            }
            e
        })
        .collect();
    let h = OperatorMatrix::from_real_diagonal(&diag)?;
    debug_assert!({
        let mut acc = OperatorMatrix::zeros(dim).expect("valid dim");
        for i in 0..n {
            let zi = embed_qubit(cfg, i + 1, &pauli::sigma_z()).expect("valid qubit");
            acc = &acc + &zi.scale_real(std::f64::consts::PI * shifts[i]);
        }
        acc.max_abs_diff(
            &OperatorMatrix::from_fn(dim, |r, c| {
                if r == c {
                    C64::new((0..n).map(|i| std::f64::consts::PI * shifts[i] * z(r, i)).sum(), 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .expect("valid dim"),
        ) < 1e-12
    });
    Ok(h)
}
