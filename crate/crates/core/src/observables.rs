//! Expectation values, quadrature moments, entropy and Wigner functions.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigvals_hermitian, partial_trace, OperatorMatrix, QuantumState, C64};
use crate::model::boson;
use crate::tolerances;

/// `<psi|O|psi>` or `Tr(rho O)`.
pub fn expectation(state: &QuantumState, op: &OperatorMatrix) -> Result<C64> {
    state.expect(op)
}

fn require_boson(state: &QuantumState, what: &str) -> Result<usize> {
    match state.dims() {
        [m] => Ok(*m),
        dims => Err(Error::UnsupportedShape(format!(
            "{what} expects a boson-only state, got dims {dims:?}"
        ))),
    }
}

/// Standard deviation of `x = (a + a†)/2`.
pub fn zpf(state: &QuantumState) -> Result<f64> {
    let m = require_boson(state, "zpf")?;
    let x = boson::x_quadrature(m)?;
    let mean = state.expect(&x)?.re;
    let second = state.expect(&x.matmul(&x))?.re;
    let var = second - mean * mean;
    if var < -tolerances::NEGATIVE_VARIANCE {
        return Err(Error::numeric(format!("negative quadrature variance {var:.3e}"), 0));
    }
    Ok(var.max(0.0).sqrt())
}

/// Von Neumann entropy (bits) of the reduction onto factor `keep` of a pure
/// bipartite state.
pub fn reduced_entropy(state: &QuantumState, keep: usize) -> Result<f64> {
    if !state.is_pure() {
        return Err(Error::precondition("entanglement entropy needs a pure state"));
    }
    let rho = partial_trace(state, keep)?;
    let probs = eigvals_hermitian(rho.as_density().expect("partial trace is a density"))?;
    Ok(shannon_bits(&probs))
}

fn shannon_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 1e-300)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Boson-spin entanglement in bits. For a pure state both reductions share
/// their spectrum, so the smaller factor is diagonalized.
pub fn entanglement_entropy(state: &QuantumState) -> Result<f64> {
    let dims = state.dims();
    if dims.len() != 2 {
        return Err(Error::UnsupportedShape(format!(
            "entanglement entropy needs a bipartite state, got dims {dims:?}"
        )));
    }
    let keep = if dims[0] <= dims[1] { 0 } else { 1 };
    reduced_entropy(state, keep)
}

/// Boson moments, with the `x` moments available from two independent routes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureMoments {
    pub a: C64,
    pub a2: C64,
    pub n: f64,
    pub x: f64,
    pub x2: f64,
}

/// Moments evaluated as traces against the truncated operators.
pub fn quadrature_moments(state: &QuantumState) -> Result<QuadratureMoments> {
    let m = require_boson(state, "quadrature_moments")?;
    let a = boson::annihilation(m)?;
    let x = boson::x_quadrature(m)?;
    Ok(QuadratureMoments {
        a: state.expect(&a)?,
        a2: state.expect(&a.matmul(&a))?,
        n: state.expect(&boson::number(m)?)?.re,
        x: state.expect(&x)?.re,
        x2: state.expect(&x.matmul(&x))?.re,
    })
}

/// Same moments assembled from density-matrix sub-diagonals:
/// `<a> = sum sqrt(n+1) rho[n+1][n]`, `<a^2> = sum sqrt((n+1)(n+2)) rho[n+2][n]`,
/// and `<x^2> = (2 Re<a^2> + 2<n> + 1 - M rho[M-1][M-1]) / 4`, the last term
/// being the truncation correction to `a a†`.
pub fn quadrature_moments_by_decomposition(state: &QuantumState) -> Result<QuadratureMoments> {
    let m = require_boson(state, "quadrature_moments")?;
    let rho = state.density_matrix();
    let mut a = C64::new(0.0, 0.0);
    let mut a2 = C64::new(0.0, 0.0);
    let mut n = 0.0;
    for k in 0..m {
        n += k as f64 * rho.get(k, k).re;
        if k + 1 < m {
            a += rho.get(k + 1, k) * ((k + 1) as f64).sqrt();
        }
        if k + 2 < m {
            a2 += rho.get(k + 2, k) * (((k + 1) * (k + 2)) as f64).sqrt();
        }
    }
    let top = rho.get(m - 1, m - 1).re;
    Ok(QuadratureMoments {
        a,
        a2,
        n,
        x: a.re,
        x2: (2.0 * a2.re + 2.0 * n + 1.0 - m as f64 * top) / 4.0,
    })
}

/// Cyclic shifts `U1 = sum |n><n+1| + |M-1><0|` and `U2 = U1^2`.
pub fn readout_operators(m: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    if m < 3 {
        return Err(Error::validation("readout operators need boson_dim >= 3"));
    }
    let shift = |k: usize| {
        OperatorMatrix::from_fn(m, |i, j| {
            if j == (i + k) % m {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    };
    Ok((shift(1)?, shift(2)?))
}

/// Rectangular phase-space grid in the `(x, p)` quadratures, `alpha = x + i p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl GridSpec {
    /// 101 x 101 points centred on `(<x>, <p>)`, each axis spanning five
    /// standard deviations of that quadrature on either side.
    pub fn auto(state: &QuantumState) -> Result<Self> {
        let m = require_boson(state, "wigner")?;
        let x = boson::x_quadrature(m)?;
        let p = boson::p_quadrature(m)?;
        let axis = |q: &OperatorMatrix| -> Result<(f64, f64)> {
            let mean = state.expect(q)?.re;
            let var = (state.expect(&q.matmul(q))?.re - mean * mean).max(0.0);
            let half = 5.0 * var.sqrt().max(0.25);
            Ok((mean - half, mean + half))
        };
        let (x_min, x_max) = axis(&x)?;
        let (p_min, p_max) = axis(&p)?;
        Ok(Self {
            x_min,
            x_max,
            p_min,
            p_max,
            nx: 101,
            np: 101,
        })
    }

    fn validate(&self) -> Result<()> {
        let ok = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && hi > lo;
        if !ok(self.x_min, self.x_max) || !ok(self.p_min, self.p_max) {
            return Err(Error::validation("grid ranges must be finite with max > min"));
        }
        if self.nx < 2 || self.np < 2 {
            return Err(Error::validation("grid needs at least two points per axis"));
        }
        Ok(())
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|k| lo + step * k as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WignerGrid {
    pub x_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    /// `W(x_i, p_j)` at index `i * p_axis.len() + j`.
    pub values: Vec<f64>,
    pub cell_area: f64,
    pub warnings: Vec<String>,
}

impl WignerGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p_axis.len() + j]
    }

    /// Riemann sum of `W` over the grid.
    pub fn normalization(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Index of the grid column closest to `x`.
    pub fn nearest_x(&self, x: f64) -> usize {
        nearest(&self.x_axis, x)
    }

    /// `W(x, p)` along the `p` axis at the column nearest to `x`.
    pub fn p_cut(&self, x: f64) -> &[f64] {
        let i = self.nearest_x(x);
        let np = self.p_axis.len();
        &self.values[i * np..(i + 1) * np]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,p,W\n");
        for (i, x) in self.x_axis.iter().enumerate() {
            for (j, p) in self.p_axis.iter().enumerate() {
                let _ = writeln!(out, "{x:?},{p:?},{:?}", self.get(i, j));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "x_axis": self.x_axis,
            "p_axis": self.p_axis,
            "values": self.values,
            "layout": "row-major, rows indexed by x",
            "metadata": {
                "cell_area": self.cell_area,
                "normalization": self.normalization(),
                "warnings": self.warnings,
            }
        })
    }
}

fn nearest(axis: &[f64], v: f64) -> usize {
    axis.iter()
        .enumerate()
        .min_by(|a, b| (a.1 - v).abs().total_cmp(&(b.1 - v).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Number of sign flips along a sampled curve, skipping samples with
/// `|W| <= floor` so round-off near nodes does not count.
pub fn sign_changes(values: &[f64], floor: f64) -> usize {
    let mut last: Option<bool> = None;
    let mut count = 0;
    for &v in values {
        if v.abs() <= floor {
            continue;
        }
        let positive = v > 0.0;
        if last.is_some_and(|l| l != positive) {
            count += 1;
        }
        last = Some(positive);
    }
    count
}

/// Displaced-parity Wigner function `W(alpha) = (2/pi) Tr[rho D(alpha) P D†(alpha)]`.
///
/// The parity matrix elements `<m|D P D†|n>` are generated by the Laguerre
/// recurrence, so the displacement is exact rather than truncated; the only
/// truncation is the state's own.
pub fn wigner(state: &QuantumState, grid: &GridSpec) -> Result<WignerGrid> {
    let m = require_boson(state, "wigner")?;
    grid.validate()?;
    let rho = state.density_matrix();
    // Drop Fock levels whose combined weight is negligible.
    let mut m_eff = m;
    let mut tail = 0.0;
    while m_eff > 1 {
        tail += rho.get(m_eff - 1, m_eff - 1).re.max(0.0);
        if tail > 1e-20 {
            break;
        }
        m_eff -= 1;
    }
    let table = LaguerreTables::new(m_eff);
    let rho_eff: Vec<C64> = (0..m_eff)
        .flat_map(|i| (0..m_eff).map(move |j| (i, j)))
        .map(|(i, j)| rho.get(i, j))
        .collect();
    let live: Vec<bool> = (0..m_eff)
        .map(|k| (0..m_eff - k).any(|i| rho_eff[i * m_eff + i + k] != C64::new(0.0, 0.0)))
        .collect();

    let x_axis = linspace(grid.x_min, grid.x_max, grid.nx);
    let p_axis = linspace(grid.p_min, grid.p_max, grid.np);
    let points = grid.nx * grid.np;
    let values: Vec<f64> = (0..points.div_ceil(LANES))
        .into_par_iter()
        .flat_map_iter(|b| {
            let alphas: [C64; LANES] = std::array::from_fn(|l| {
                let k = (b * LANES + l).min(points - 1);
                C64::new(x_axis[k / grid.np], p_axis[k % grid.np])
            });
            let w = wigner_batch(&rho_eff, m_eff, &live, &table, &alphas);
            let n = LANES.min(points - b * LANES);
            w.into_iter().take(n)
        })
        .collect();

    let cell_area = (x_axis[1] - x_axis[0]) * (p_axis[1] - p_axis[0]);
    let mut warnings = Vec::new();
    let tail = (m - m.div_ceil(10)..m).map(|k| rho.get(k, k).re).sum::<f64>();
    if tail > tolerances::WIGNER_TAIL_WARNING {
        warnings.push(format!(
            "state carries {:.2}% of its weight in the top 10% of Fock levels; boson_dim is likely too small",
            100.0 * tail
        ));
    }
    let mut out = WignerGrid {
        x_axis,
        p_axis,
        values,
        cell_area,
        warnings,
    };
    let norm = out.normalization();
    if (norm - 1.0).abs() > tolerances::WIGNER_NORMALIZATION {
        out.warnings.push(format!(
            "grid integral is {norm:.4}; the grid does not resolve or cover the state"
        ));
    }
    Ok(out)
}

struct LaguerreTables {
    sqrt: Vec<f64>,
    inv_sqrt: Vec<f64>,
}

impl LaguerreTables {
    fn new(m: usize) -> Self {
        let sqrt: Vec<f64> = (0..=m).map(|k| (k as f64).sqrt()).collect();
        let inv_sqrt = sqrt.iter().map(|s| if *s > 0.0 { 1.0 / s } else { 0.0 }).collect();
        Self { sqrt, inv_sqrt }
    }
}

const LANES: usize = 8;

/// `W(alpha) = (2/pi)[sum_m rho_mm (-1)^m f_m^0 + 2 Re sum_{k>=1} e^{ik phi} sum_m rho_{m,m+k} (-1)^m f_m^k]`
/// with `f_m^k(x) = sqrt(m!/(m+k)!) x^{k/2} e^{-x/2} L_m^k(x)`, `x = 4|alpha|^2`.
///
/// `|f_m^k| <= 1`, and the forward recurrence in `m` follows the dominant
/// solution, so it is stable; a per-column log scale absorbs the underflow of
/// the starting value when `x` is large. Points are processed in lock-step
/// batches because each recurrence is a serial dependency chain.
fn wigner_batch(rho: &[C64], m: usize, live: &[bool], t: &LaguerreTables, alpha: &[C64; LANES]) -> [f64; LANES] {
    const BIG: f64 = 1e150;
    let ln_big = BIG.ln();
    let x: [f64; LANES] = alpha.map(|a| 4.0 * a.norm_sqr());
    let ln_x = x.map(f64::ln);
    let phase = alpha.map(|a| {
        if a.norm() > 0.0 {
            a / a.norm()
        } else {
            C64::new(1.0, 0.0)
        }
    });
    let mut rotation = [C64::new(1.0, 0.0); LANES];
    let mut ln_k_fact = 0.0;
    let mut total = [0.0; LANES];
    for k in 0..m {
        if k > 0 {
            ln_k_fact += (k as f64).ln();
            for l in 0..LANES {
                rotation[l] *= phase[l];
            }
        }
        if !live[k] {
            continue;
        }
        // f_0^k = x^{k/2} e^{-x/2} / sqrt(k!) kept as mantissa * exp(log_scale);
        // at x = 0 only the k = 0 column survives.
        let mut log_scale = [0.0; LANES];
        for l in 0..LANES {
            log_scale[l] = if x[l] > 0.0 {
                0.5 * k as f64 * ln_x[l] - 0.5 * x[l] - 0.5 * ln_k_fact
            } else if k == 0 {
                0.0
            } else {
                f64::NEG_INFINITY
            };
        }
        let mut prev = [0.0f64; LANES];
        let mut cur = [1.0f64; LANES];
        let mut re = [0.0f64; LANES];
        let mut im = [0.0f64; LANES];
        for mm in 0..m - k {
            if mm > 0 {
                let base = 2.0 * (mm - 1) as f64 + 1.0 + k as f64;
                let back = t.sqrt[mm - 1] * t.sqrt[mm - 1 + k];
                let inv = t.inv_sqrt[mm] * t.inv_sqrt[mm + k];
                let mut peak = 0.0f64;
                for l in 0..LANES {
                    let next = ((base - x[l]) * cur[l] - back * prev[l]) * inv;
                    prev[l] = cur[l];
                    cur[l] = next;
                    peak = peak.max(next.abs());
                }
                if peak > BIG {
                    for l in 0..LANES {
                        if cur[l].abs() > 1.0 {
                            prev[l] /= BIG;
                            cur[l] /= BIG;
                            re[l] /= BIG;
                            im[l] /= BIG;
                            log_scale[l] += ln_big;
                        }
                    }
                }
            }
            let r = rho[mm * m + mm + k];
            let sign = if mm % 2 == 0 { 1.0 } else { -1.0 };
            let (rr, ri) = (sign * r.re, sign * r.im);
            for l in 0..LANES {
                re[l] += rr * cur[l];
                im[l] += ri * cur[l];
            }
        }
        for l in 0..LANES {
            let weight = log_scale[l].exp();
            if weight == 0.0 {
                continue;
            }
            let column = C64::new(re[l], im[l]);
            total[l] += if k == 0 {
                column.re * weight
            } else {
                2.0 * (rotation[l] * column).re * weight
            };
        }
    }
    total.map(|v| 2.0 / PI * v)
}
