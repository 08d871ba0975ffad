//! JSON run configuration shared by the CLI subcommands.
//!
//! ```json
//! {
//!   "system": "paper_example",
//!   "T": 1.0, "p": 2.0, "J": 15, "M": 201,
//!   "quadrature": "simpson", "tol": 1e-10,
//!   "max_iter": 200, "relaxation": 1.0
//! }
//! ```
//!
//! `system` is either a built-in name (`zero`, `constant_forcing`,
//! `paper_example`) or a coefficient table
//! `{"coeffs": [{"j": 1, "a": 0.5, "b": [[2, 0.1]], "c": [[1, -0.05]]}],
//!   "envelopes": [{"j": 1, "g": 1.0, "h": 0.2}]}`
//! describing f_j(t, v) = a_j + sum_k b_jk v_k + c_jk v_k^2 with constant
//! envelopes, which are spot-checked at load time. The optional `verify`
//! object overrides verification thresholds.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::GreenKernel;
use crate::quadrature::QuadratureRule;
use crate::seqspace::LpParams;
use crate::solver::{Initial, SolverConfig};
use crate::system::{
    spot_check_envelopes, CoefficientTable, ConstantForcing, PaperExample, System, TableRow,
    ZeroSystem,
};
use crate::verifier::VerifyThresholds;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemChoice {
    Builtin(String),
    Custom(CustomSystem),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSystem {
    pub coeffs: Vec<CoeffRow>,
    #[serde(default)]
    pub envelopes: Vec<EnvelopeRow>,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffRow {
    pub j: usize,
    #[serde(default)]
    pub a: f64,
    /// Linear coupling as [k, coefficient] pairs.
    #[serde(default)]
    pub b: Vec<(usize, f64)>,
    /// Diagonal-quadratic coupling as [k, coefficient] pairs.
    #[serde(default)]
    pub c: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeRow {
    pub j: usize,
    #[serde(default)]
    pub g: f64,
    #[serde(default)]
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureChoice {
    Simpson,
    Gauss,
}

impl Default for QuadratureChoice {
    fn default() -> Self {
        QuadratureChoice::Simpson
    }
}

fn default_p() -> f64 {
    2.0
}
fn default_components() -> usize {
    15
}
fn default_mesh() -> usize {
    201
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    200
}
fn default_relaxation() -> f64 {
    1.0
}
fn default_gauss_order() -> usize {
    5
}
fn default_t_samples() -> usize {
    201
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub system: SystemChoice,
    #[serde(rename = "T")]
    pub t_len: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(rename = "J", default = "default_components")]
    pub components: usize,
    #[serde(rename = "M", default = "default_mesh")]
    pub mesh_points: usize,
    #[serde(default)]
    pub quadrature: QuadratureChoice,
    #[serde(default = "default_gauss_order")]
    pub gauss_order: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_relaxation")]
    pub relaxation: f64,
    /// Sample count for the envelope suprema.
    #[serde(default = "default_t_samples")]
    pub t_samples: usize,
    #[serde(default)]
    pub verify: VerifyThresholds,
}

impl Config {
    pub fn from_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedConfig(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::MalformedConfig(format!("{}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    pub fn lp_params(&self) -> Result<LpParams> {
        LpParams::new(self.p)
    }

    pub fn kernel(&self) -> Result<GreenKernel> {
        GreenKernel::new(self.t_len)
    }

    pub fn quadrature_rule(&self) -> QuadratureRule {
        match self.quadrature {
            QuadratureChoice::Simpson => QuadratureRule::Simpson,
            QuadratureChoice::Gauss => QuadratureRule::GaussLegendre {
                order: self.gauss_order,
            },
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            components: self.components,
            mesh_points: self.mesh_points,
            quadrature: self.quadrature_rule(),
            tol: self.tol,
            max_iter: self.max_iter,
            relaxation: self.relaxation,
            initial: Initial::Zero,
            ball_radius: None,
        }
    }

    /// Instantiate the configured system, validating coefficient tables
    /// and spot-checking their envelopes.
    pub fn load_system(&self) -> Result<Box<dyn System>> {
        let params = self.lp_params()?;
        let spec: Box<dyn System> = match &self.system {
            SystemChoice::Builtin(name) => match name.as_str() {
                "zero" => Box::new(ZeroSystem),
                "constant_forcing" => Box::new(ConstantForcing),
                "paper_example" => Box::new(PaperExample::new()),
                other => return Err(Error::UnknownSystem(other.to_string())),
            },
            SystemChoice::Custom(custom) => Box::new(build_table(custom, self.components)?),
        };
        spot_check_envelopes(spec.as_ref(), self.t_len, self.components, params)?;
        Ok(spec)
    }
}

fn build_table(custom: &CustomSystem, components: usize) -> Result<CoefficientTable> {
    let mut rows = BTreeMap::new();
    for row in &custom.coeffs {
        if row.j == 0 || row.j > components {
            return Err(Error::MalformedConfig(format!(
                "coefficient row j = {} outside 1..={components}",
                row.j
            )));
        }
        let mut table_row = TableRow {
            constant: row.a,
            ..Default::default()
        };
        for &(k, coeff) in &row.b {
            if k == 0 || k > components {
                return Err(Error::MalformedConfig(format!(
                    "linear index k = {k} outside 1..={components} in row j = {}",
                    row.j
                )));
            }
            table_row.linear.insert(k, coeff);
        }
        for &(k, coeff) in &row.c {
            if k == 0 || k > components {
                return Err(Error::MalformedConfig(format!(
                    "quadratic index k = {k} outside 1..={components} in row j = {}",
                    row.j
                )));
            }
            table_row.quadratic.insert(k, coeff);
        }
        if rows.insert(row.j, table_row).is_some() {
            return Err(Error::MalformedConfig(format!(
                "duplicate coefficient row j = {}",
                row.j
            )));
        }
    }
    let mut envelopes = BTreeMap::new();
    for env in &custom.envelopes {
        if env.j == 0 || env.j > components {
            return Err(Error::MalformedConfig(format!(
                "envelope row j = {} outside 1..={components}",
                env.j
            )));
        }
        if env.g < 0.0 || env.h < 0.0 || !env.g.is_finite() || !env.h.is_finite() {
            return Err(Error::MalformedConfig(format!(
                "envelope row j = {} needs finite g, h >= 0",
                env.j
            )));
        }
        if envelopes.insert(env.j, (env.g, env.h)).is_some() {
            return Err(Error::MalformedConfig(format!(
                "duplicate envelope row j = {}",
                env.j
            )));
        }
    }
    let label = custom.label.clone().unwrap_or_else(|| "custom".to_string());
    Ok(CoefficientTable::new(label, rows, envelopes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config_with_defaults() {
        let cfg = Config::from_str(r#"{"system": "zero", "T": 1.0}"#).unwrap();
        assert_eq!(cfg.p, 2.0);
        assert_eq!(cfg.components, 15);
        assert_eq!(cfg.mesh_points, 201);
        assert_eq!(cfg.quadrature, QuadratureChoice::Simpson);
        assert_eq!(cfg.tol, 1e-10);
        assert_eq!(cfg.max_iter, 200);
        assert_eq!(cfg.relaxation, 1.0);
        assert!(cfg.load_system().is_ok());
    }

    #[test]
    fn rejects_unknown_fields_and_systems() {
        assert!(matches!(
            Config::from_str(r#"{"system": "zero", "T": 1.0, "bogus": 3}"#),
            Err(Error::MalformedConfig(_))
        ));
        let cfg = Config::from_str(r#"{"system": "does_not_exist", "T": 1.0}"#).unwrap();
        assert!(matches!(
            cfg.load_system(),
            Err(Error::UnknownSystem(_))
        ));
    }

    #[test]
    fn parses_custom_table_and_spot_checks() {
        let text = r#"{
            "system": {
                "coeffs": [{"j": 1, "a": 0.5, "b": [[2, 0.1]], "c": [[1, -0.05]]}],
                "envelopes": [{"j": 1, "g": 2.0, "h": 1.0}]
            },
            "T": 1.0, "J": 3, "M": 41
        }"#;
        let cfg = Config::from_str(text).unwrap();
        let sys = cfg.load_system().unwrap();
        assert_eq!(sys.label(), "custom");
        assert!((sys.eval_component(1, 0.0, &[0.2, 1.0, 0.0]) - 0.598).abs() < 1e-15);
    }

    #[test]
    fn custom_table_index_validation() {
        let out_of_range = r#"{
            "system": {"coeffs": [{"j": 9, "a": 1.0}]},
            "T": 1.0, "J": 3
        }"#;
        let cfg = Config::from_str(out_of_range).unwrap();
        assert!(matches!(cfg.load_system(), Err(Error::MalformedConfig(_))));

        let bad_envelope = r#"{
            "system": {
                "coeffs": [{"j": 1, "a": 1.0}],
                "envelopes": [{"j": 1, "g": -1.0, "h": 0.0}]
            },
            "T": 1.0, "J": 3
        }"#;
        let cfg = Config::from_str(bad_envelope).unwrap();
        assert!(matches!(cfg.load_system(), Err(Error::MalformedConfig(_))));
    }

    #[test]
    fn envelope_violation_detected_at_load() {
        // f_1 = 2 with envelope g = 1: |2|^2 > 1
        let text = r#"{
            "system": {
                "coeffs": [{"j": 1, "a": 2.0}],
                "envelopes": [{"j": 1, "g": 1.0, "h": 0.0}]
            },
            "T": 1.0, "J": 2
        }"#;
        let cfg = Config::from_str(text).unwrap();
        assert!(matches!(
            cfg.load_system(),
            Err(Error::EnvelopeViolation { .. })
        ));
    }

    #[test]
    fn gauss_choice_carries_order() {
        let cfg = Config::from_str(
            r#"{"system": "zero", "T": 1.0, "quadrature": "gauss", "gauss_order": 3}"#,
        )
        .unwrap();
        assert_eq!(
            cfg.quadrature_rule(),
            QuadratureRule::GaussLegendre { order: 3 }
        );
    }

    #[test]
    fn verify_thresholds_override() {
        let cfg = Config::from_str(
            r#"{"system": "zero", "T": 1.0, "verify": {"residual_fd_max": 0.5}}"#,
        )
        .unwrap();
        assert_eq!(cfg.verify.residual_fd_max, 0.5);
        // untouched fields keep their defaults
        assert_eq!(cfg.verify.boundary_max, 1e-12);
    }
}
