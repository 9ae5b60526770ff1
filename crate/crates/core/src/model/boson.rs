//! Truncated single-mode operators on Fock levels `0..m`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::linalg::{expm_anti_hermitian_gauged, GaugedGenerator, OperatorMatrix, C64};
use crate::tolerances;

pub use crate::mapping::truncated_annihilation as annihilation;

pub fn creation(m: usize) -> Result<OperatorMatrix> {
    Ok(annihilation(m)?.adjoint())
}

pub fn number(m: usize) -> Result<OperatorMatrix> {
    let d: Vec<f64> = (0..m).map(|n| n as f64).collect();
    OperatorMatrix::from_real_diagonal(&d)
}

/// `a + a†`, the unnormalized position operator.
pub fn position_sum(m: usize) -> Result<OperatorMatrix> {
    let a = annihilation(m)?;
    Ok(&a + &a.adjoint())
}

/// `x = (a + a†) / 2`.
pub fn x_quadrature(m: usize) -> Result<OperatorMatrix> {
    Ok(position_sum(m)?.scale_real(0.5))
}

/// `p = i (a† - a) / 2`.
pub fn p_quadrature(m: usize) -> Result<OperatorMatrix> {
    let a = annihilation(m)?;
    Ok((&a.adjoint() - &a).scale(C64::new(0.0, 0.5)))
}

/// `diag((-1)^n)`.
pub fn parity(m: usize) -> Result<OperatorMatrix> {
    let d: Vec<f64> = (0..m).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect();
    OperatorMatrix::from_real_diagonal(&d)
}

fn check_squeeze(r: f64) -> Result<()> {
    if !r.is_finite() || r.abs() > tolerances::MAX_SQUEEZE {
        return Err(Error::range(format!(
            "squeezing |r| = {:.4} exceeds {}; the truncated operator is unreliable there, \
             move closer to the stable region or reduce alpha/xi",
            r.abs(),
            tolerances::MAX_SQUEEZE
        )));
    }
    Ok(())
}

fn check_displacement(beta: C64, m: usize) -> Result<()> {
    if !(beta.re.is_finite() && beta.im.is_finite()) {
        return Err(Error::validation("displacement must be finite"));
    }
    if beta.norm_sqr() > m as f64 / 4.0 {
        return Err(Error::range(format!(
            "|beta|^2 = {:.3} exceeds boson_dim/4 = {:.3}; increase boson_dim",
            beta.norm_sqr(),
            m as f64 / 4.0
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum GeneratorKind {
    Squeeze,
    Displace,
}

type GeneratorCache = Mutex<HashMap<(GeneratorKind, usize), Arc<GaugedGenerator>>>;

/// Diagonalized generators are reused across calls; entries are a few MB at
/// most, and the cache is flushed when it grows past a handful of sizes.
fn cached(kind: GeneratorKind, m: usize) -> Result<Arc<GaugedGenerator>> {
    const MAX_ENTRIES: usize = 8;
    static CACHE: OnceLock<GeneratorCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(g) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&(kind, m)) {
        return Ok(Arc::clone(g));
    }
    let g = Arc::new(match kind {
        GeneratorKind::Squeeze => squeezing_generator(m)?,
        GeneratorKind::Displace => displacement_generator(m)?,
    });
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    if guard.len() >= MAX_ENTRIES {
        guard.clear();
    }
    guard.insert((kind, m), Arc::clone(&g));
    Ok(g)
}

/// Spectral form of `(a^2 - a†^2)/2`, so that `S(r) = exp(r G)`.
pub fn squeezing_generator(m: usize) -> Result<GaugedGenerator> {
    let a = annihilation(m)?;
    let a2 = a.matmul(&a);
    let g = (&a2 - &a2.adjoint()).scale_real(0.5);
    // a^2 couples n and n-2, so diag(i^{floor(n/2)}) renders -i G real.
    let gauge: Vec<C64> = (0..m).map(|n| C64::new(0.0, 1.0).powu((n / 2) as u32)).collect();
    GaugedGenerator::new(&g, &gauge)
}

/// Spectral form of `a† - a`, so that `D(b) = exp(b G)` for real `b`.
pub fn displacement_generator(m: usize) -> Result<GaugedGenerator> {
    let a = annihilation(m)?;
    let g = &a.adjoint() - &a;
    let gauge: Vec<C64> = (0..m).map(|n| C64::new(0.0, 1.0).powu(n as u32)).collect();
    GaugedGenerator::new(&g, &gauge)
}

/// Squeezing `S(r) = exp[r (a^2 - a†^2) / 2]` on the truncated space.
///
/// `S(r)† (a + a†) S(r) = e^{-r} (a + a†)` in the untruncated limit, so a
/// negative `r` stretches the position quadrature.
pub fn squeezing_operator(r: f64, m: usize) -> Result<OperatorMatrix> {
    check_squeeze(r)?;
    Ok(cached(GeneratorKind::Squeeze, m)?.matrix(r))
}

/// `S(r) v` without forming the operator.
pub fn squeeze_vector(r: f64, v: &[C64]) -> Result<Vec<C64>> {
    check_squeeze(r)?;
    Ok(cached(GeneratorKind::Squeeze, v.len())?.apply(r, v))
}

/// `D(b) v` for real `b` without forming the operator.
pub fn displace_vector(b: f64, v: &[C64]) -> Result<Vec<C64>> {
    check_displacement(C64::new(b, 0.0), v.len())?;
    Ok(cached(GeneratorKind::Displace, v.len())?.apply(b, v))
}

/// Displacement `D(beta) = exp(beta a† - beta* a)`.
pub fn displacement_operator(beta: C64, m: usize) -> Result<OperatorMatrix> {
    check_displacement(beta, m)?;
    let a = annihilation(m)?;
    let g = &a.adjoint().scale(beta) - &a.scale(beta.conj());
    let phi = beta.arg();
    let gauge: Vec<C64> = (0..m)
        .map(|n| C64::from_polar(1.0, n as f64 * phi) * C64::new(0.0, 1.0).powu(n as u32))
        .collect();
    expm_anti_hermitian_gauged(&g, &gauge)
}

/// Vacuum `|0>` on `m` levels.
/// Coherent state `D(b)|0>` for real `b`, from the closed-form Fock
/// amplitudes `e^{-b^2/2} b^n / sqrt(n!)` (no truncated exponential).
///
/// Amplitudes are generated outward from the peak by the ratio `b/sqrt(n)`
/// and normalized over the untruncated support, so the returned vector is
/// short exactly by the weight beyond level `m - 1`.
pub fn coherent_state(b: f64, m: usize) -> Result<Vec<C64>> {
    if m == 0 {
        return Err(Error::validation("boson_dim must be positive"));
    }
    let b2 = b * b;
    let peak = b2.floor() as usize;
    let end = (b2 + 40.0 * b.abs() + 60.0).ceil() as usize;
    let len = m.max(end);
    let mut amp = vec![0.0f64; len];
    amp[peak.min(len - 1)] = 1.0;
    for n in peak + 1..len {
        amp[n] = amp[n - 1] * b.abs() / (n as f64).sqrt();
    }
    for n in (0..peak.min(len - 1)).rev() {
        amp[n] = amp[n + 1] * ((n + 1) as f64).sqrt() / b.abs();
    }
    let norm = amp.iter().map(|a| a * a).sum::<f64>().sqrt();
    Ok((0..m)
        .map(|n| {
            let sign = if b < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
            C64::new(sign * amp[n] / norm, 0.0)
        })
        .collect())
}

pub fn vacuum(m: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); m];
    v[0] = C64::new(1.0, 0.0);
    v
}

/// Weight carried by the top `k` Fock levels of a vector.
pub fn tail_weight(v: &[C64], k: usize) -> f64 {
    let start = v.len().saturating_sub(k);
    v[start..].iter().map(|z| z.norm_sqr()).sum()
}

/// Overlap `|<0| S_m(r)† S_ref(r) |0>|` between squeezed vacua built on `m`
/// and on `m_ref` levels, the smaller one zero-padded.
pub fn squeezing_truncation_fidelity(r: f64, m: usize, m_ref: usize) -> Result<f64> {
    if m > m_ref {
        return Err(Error::range("reference truncation must not be smaller"));
    }
    let small = squeeze_vector(r, &vacuum(m))?;
    let reference = squeeze_vector(r, &vacuum(m_ref))?;
    let overlap: C64 = small.iter().zip(&reference).map(|(a, b)| a.conj() * b).sum();
    Ok(overlap.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inner;

    fn expect(v: &[C64], op: &OperatorMatrix) -> C64 {
        inner(v, &op.apply(v))
    }

    #[test]
    fn zero_parameters_give_identity() {
        let id = OperatorMatrix::identity(16).unwrap();
        assert!(squeezing_operator(0.0, 16).unwrap().max_abs_diff(&id) < 1e-14);
        assert!(displacement_operator(C64::new(0.0, 0.0), 16).unwrap().max_abs_diff(&id) < 1e-14);
    }

    #[test]
    fn squeezed_vacuum_variance() {
        // 4 xi / omega = 0.75 gives r = ln(0.25)/4 and ZPF = e^{-r}/2 = 1/sqrt(2).
        let r = 0.25 * 0.25f64.ln();
        assert!((r + 0.3466).abs() < 1e-4);
        let v = squeezing_operator(r, 64).unwrap().column(0);
        let x = x_quadrature(64).unwrap();
        let var = expect(&v, &x.matmul(&x)).re - expect(&v, &x).re.powi(2);
        assert!((var.sqrt() - 0.5f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn squeezed_vacuum_second_moment() {
        let m = 128;
        let a = annihilation(m).unwrap();
        let a2 = a.matmul(&a);
        for r in [-1.0, -0.4, 0.3, 1.0] {
            let v = squeezing_operator(r, m).unwrap().column(0);
            assert!(expect(&v, &a).norm() < 1e-12);
            let got = expect(&v, &a2);
            assert!((got.re + r.sinh() * r.cosh()).abs() < 1e-6, "r={r}: {got}");
        }
    }

    #[test]
    fn coherent_state_moments() {
        let m = 64;
        let a = annihilation(m).unwrap();
        let d = displacement_operator(C64::new(1.0, 0.0), m).unwrap();
        let v = d.column(0);
        assert!((expect(&v, &a) - C64::new(1.0, 0.0)).norm() < 1e-8);
        assert!((expect(&v, &number(m).unwrap()).re - 1.0).abs() < 1e-8);
        let beta = C64::new(0.8, -1.1);
        let v = displacement_operator(beta, m).unwrap().column(0);
        assert!((expect(&v, &a) - beta).norm() < 1e-8);
        assert!((expect(&v, &number(m).unwrap()).re - beta.norm_sqr()).abs() < 1e-8);
    }

    #[test]
    fn squeezing_transforms_position() {
        let m = 256;
        let r = -0.4;
        let s = squeezing_operator(r, m).unwrap();
        let x = position_sum(m).unwrap();
        let lhs = s.adjoint().matmul(&x).matmul(&s);
        let rhs = x.scale_real((-r).exp());
        // Compare on low levels, away from the truncation edge.
        for i in 0..40 {
            for j in 0..40 {
                assert!((lhs.get(i, j) - rhs.get(i, j)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn unitary_on_low_subspace() {
        let m = 64;
        for u in [
            squeezing_operator(0.8, m).unwrap(),
            displacement_operator(C64::new(1.5, 0.5), m).unwrap(),
        ] {
            assert!(u.unitarity_defect() < 1e-9);
            let cols: Vec<Vec<C64>> = (0..m / 2).map(|j| u.column(j)).collect();
            for (i, ci) in cols.iter().enumerate() {
                for (j, cj) in cols.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((inner(ci, cj) - C64::new(want, 0.0)).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn vector_application_matches_operator() {
        let m = 40;
        let v: Vec<C64> = (0..m)
            .map(|k| C64::new((-(k as f64) / 3.0).exp(), 0.1 * k as f64))
            .collect();
        let s = squeezing_operator(-0.7, m).unwrap().apply(&v);
        let fast = squeeze_vector(-0.7, &v).unwrap();
        let d = displacement_operator(C64::new(-1.2, 0.0), m).unwrap().apply(&v);
        let dfast = displace_vector(-1.2, &v).unwrap();
        for k in 0..m {
            assert!((s[k] - fast[k]).norm() < 1e-12);
            assert!((d[k] - dfast[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn range_guards() {
        assert!(matches!(squeezing_operator(3.5, 8), Err(Error::Range(_))));
        assert!(matches!(
            displacement_operator(C64::new(3.0, 0.0), 16),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn truncation_fidelity_falls_with_smaller_space() {
        let r = -1.5;
        let f: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&m| squeezing_truncation_fidelity(r, m, 256).unwrap())
            .collect();
        for w in f.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(f[3] > 0.99);
    }

    #[test]
    fn coherent_closed_form_matches_displacement() {
        for b in [-1.7, 0.0, 0.9, 2.5] {
            let exact = coherent_state(b, 96).unwrap();
            let via_d = displace_vector(b, &vacuum(96)).unwrap();
            for (x, y) in exact.iter().zip(&via_d) {
                assert!((x - y).norm() < 1e-10, "beta {b}");
            }
        }
        let far = coherent_state(31.0, 2048).unwrap();
        let norm: f64 = far.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12, "{norm}");
    }
}
