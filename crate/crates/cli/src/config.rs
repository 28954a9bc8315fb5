//! Run configuration: built-in defaults, then a JSON config file, then flags.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Every tunable of every subcommand. Unset fields fall back to the
/// subcommand's documented default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<f64>,
    /// Quadratic differential as JSON text or a JSON value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qd: Option<serde_json::Value>,
    /// Second differential for the polarized Hessian.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ells: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left_theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right_theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intervals: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl RunConfig {
    /// Fields set in `over` replace those in `self`.
    pub fn merged(self, over: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            ell,
            qd,
            psi,
            l0,
            l1,
            steps,
            ells,
            c0,
            ladder,
            left,
            right,
            left_theta,
            right_theta,
            base,
            t_max,
            samples,
            intervals,
            seed,
            format,
            out
        )
    }
}

/// A differential given either as a JSON string (from a flag) or inline JSON (from a file).
pub fn qd_text(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
