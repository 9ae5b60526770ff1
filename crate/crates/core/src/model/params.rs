use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances;

fn default_omega() -> f64 {
    1.0
}

/// Physical parameters of the extended Rabi model.
///
/// Energies are in units where `omega` sets the scale. The coupling is given
/// through the dimensionless `lambda_tilde = 2 lambda / sqrt(Omega omega)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(default = "default_omega")]
    pub omega: f64,
    /// Two-level splitting over boson frequency, `Omega / omega`.
    pub ratio: f64,
    pub lambda_tilde: f64,
    /// Strength of the A^2 term.
    pub alpha: f64,
    pub xi_over_omega: f64,
    /// Boson truncation: Fock levels `0..boson_dim`.
    pub boson_dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub field: Option<String>,
    pub message: String,
}

impl Diagnostic {
    pub fn error(field: &str, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            field: Some(field.to_string()),
            message: message.into(),
        }
    }

    pub fn warning(field: Option<&str>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            field: field.map(str::to_string),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match &self.field {
            Some(field) => write!(f, "{tag}: {field}: {}", self.message),
            None => write!(f, "{tag}: {}", self.message),
        }
    }
}

impl ModelParams {
    pub fn new(ratio: f64, lambda_tilde: f64, alpha: f64, xi_over_omega: f64, boson_dim: usize) -> Self {
        Self {
            omega: 1.0,
            ratio,
            lambda_tilde,
            alpha,
            xi_over_omega,
            boson_dim,
        }
    }

    pub fn with_lambda_tilde(mut self, lambda_tilde: f64) -> Self {
        self.lambda_tilde = lambda_tilde;
        self
    }

    pub fn with_ratio(mut self, ratio: f64) -> Self {
        self.ratio = ratio;
        self
    }

    pub fn with_boson_dim(mut self, boson_dim: usize) -> Self {
        self.boson_dim = boson_dim;
        self
    }

    pub fn with_xi_over_omega(mut self, xi_over_omega: f64) -> Self {
        self.xi_over_omega = xi_over_omega;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    /// Two-level splitting `Omega`.
    pub fn big_omega(&self) -> f64 {
        self.ratio * self.omega
    }

    /// Absolute coupling `lambda = lambda_tilde sqrt(Omega omega) / 2`.
    pub fn lambda(&self) -> f64 {
        self.lambda_tilde * (self.big_omega() * self.omega).sqrt() / 2.0
    }

    pub fn xi(&self) -> f64 {
        self.xi_over_omega * self.omega
    }

    /// `1 + alpha lambda_tilde^2 - 4 xi / omega`; the frame is stable when positive.
    pub fn stability_radicand(&self) -> f64 {
        1.0 + self.alpha * self.lambda_tilde * self.lambda_tilde - 4.0 * self.xi_over_omega
    }

    /// Every problem with the parameters, errors and warnings alike.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let positive = |name: &str, v: f64, out: &mut Vec<Diagnostic>| {
            if !(v.is_finite() && v > 0.0) {
                out.push(Diagnostic::error(
                    name,
                    format!("must be a finite positive number, got {v}"),
                ));
            }
        };
        let nonneg = |name: &str, v: f64, out: &mut Vec<Diagnostic>| {
            if !(v.is_finite() && v >= 0.0) {
                out.push(Diagnostic::error(
                    name,
                    format!("must be finite and non-negative, got {v}"),
                ));
            }
        };
        positive("omega", self.omega, &mut out);
        positive("ratio", self.ratio, &mut out);
        nonneg("lambda_tilde", self.lambda_tilde, &mut out);
        nonneg("alpha", self.alpha, &mut out);
        if !self.xi_over_omega.is_finite() {
            out.push(Diagnostic::error("xi_over_omega", "must be finite"));
        }
        if self.boson_dim < 2 {
            out.push(Diagnostic::error(
                "boson_dim",
                format!("must be at least 2, got {}", self.boson_dim),
            ));
        } else if self.boson_dim > tolerances::MAX_DIM / 2 {
            out.push(Diagnostic::error(
                "boson_dim",
                format!("boson_dim x 2 exceeds the dimension limit {}", tolerances::MAX_DIM),
            ));
        }
        if out.is_empty() && self.stability_radicand() <= 0.0 {
            out.push(Diagnostic::warning(
                None,
                format!(
                    "parameter point is UNSTABLE (UP): 1 + alpha*lambda_tilde^2 - 4*xi/omega = {:.6}",
                    self.stability_radicand()
                ),
            ));
        }
        out
    }

    /// Fails with every error diagnostic joined; warnings are ignored.
    pub fn validate(&self) -> Result<()> {
        let errors: Vec<String> = self
            .diagnostics()
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .map(|d| d.to_string())
            .collect();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::validation(errors.join("; ")))
        }
    }
}
