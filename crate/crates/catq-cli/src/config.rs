//! Experiment configuration: strict JSON with unknown keys rejected.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    RealitySweep,
    MaxBound,
    OracleCompare,
    Oscillator,
    Continuity,
    Demo,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::RealitySweep => "reality_sweep",
            ExperimentKind::MaxBound => "max_bound",
            ExperimentKind::OracleCompare => "oracle_compare",
            ExperimentKind::Oscillator => "oscillator",
            ExperimentKind::Continuity => "continuity",
            ExperimentKind::Demo => "demo",
        }
    }
}

/// Where the Hamiltonian comes from.
#[derive(Debug, Clone)]
pub enum HamiltonianSource {
    Random {
        dim: usize,
        im_upper: f64,
        im_spread: f64,
        cond_target: f64,
    },
    File {
        path: String,
    },
    Oscillator {
        mass: Complex64,
        omega: Complex64,
        grid_max: f64,
        n_points: usize,
    },
    Triangular,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub hamiltonian: Option<HamiltonianSource>,
    pub t_a: f64,
    pub t_b: f64,
    pub hbar: f64,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub params: BTreeMap<String, f64>,
    pub output_path: Option<String>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

const TOP_KEYS: &[&str] = &[
    "kind",
    "hamiltonian",
    "t_a",
    "t_b",
    "hbar",
    "seed",
    "tolerances",
    "params",
    "output_path",
];

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| err(format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| err("top level must be a JSON object"))?;
    for key in obj.keys() {
        if !TOP_KEYS.contains(&key.as_str()) {
            return Err(err(format!("unknown key {key:?}")));
        }
    }

    let kind: ExperimentKind = serde_json::from_value(
        obj.get("kind")
            .cloned()
            .ok_or_else(|| err("missing required key \"kind\""))?,
    )
    .map_err(|e| err(format!("bad \"kind\": {e}")))?;

    let hamiltonian = match obj.get("hamiltonian") {
        None => None,
        Some(v) => Some(parse_source(v)?),
    };

    let get_f64 = |key: &str, default: f64| -> Result<f64, ConfigError> {
        match obj.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .ok_or_else(|| err(format!("\"{key}\" must be a number"))),
        }
    };
    let t_a = get_f64("t_a", 0.0)?;
    let t_b = get_f64("t_b", 1.0)?;
    let hbar = get_f64("hbar", 1.0)?;
    if !(t_b > t_a) {
        return Err(err(format!("t_b ({t_b}) must be greater than t_a ({t_a})")));
    }
    if !(hbar > 0.0) {
        return Err(err("hbar must be positive"));
    }
    let seed = match obj.get("seed") {
        None => 0,
        Some(v) => v
            .as_u64()
            .ok_or_else(|| err("\"seed\" must be a non-negative integer"))?,
    };

    let parse_map = |key: &str| -> Result<BTreeMap<String, f64>, ConfigError> {
        match obj.get(key) {
            None => Ok(BTreeMap::new()),
            Some(v) => {
                let map = v
                    .as_object()
                    .ok_or_else(|| err(format!("\"{key}\" must be an object")))?;
                let mut out = BTreeMap::new();
                for (k, val) in map {
                    let num = val
                        .as_f64()
                        .ok_or_else(|| err(format!("\"{key}.{k}\" must be a number")))?;
                    out.insert(k.clone(), num);
                }
                Ok(out)
            }
        }
    };
    let tolerances = parse_map("tolerances")?;
    let params = parse_map("params")?;

    let output_path = match obj.get("output_path") {
        None => None,
        Some(v) => Some(
            v.as_str()
                .ok_or_else(|| err("\"output_path\" must be a string"))?
                .to_string(),
        ),
    };

    Ok(ExperimentConfig {
        kind,
        hamiltonian,
        t_a,
        t_b,
        hbar,
        seed,
        tolerances,
        params,
        output_path,
    })
}

fn parse_source(value: &Value) -> Result<HamiltonianSource, ConfigError> {
    let obj = value
        .as_object()
        .ok_or_else(|| err("\"hamiltonian\" must be an object"))?;
    let source = obj
        .get("source")
        .and_then(|v| v.as_str())
        .ok_or_else(|| err("hamiltonian needs a \"source\" string"))?;

    let allowed: &[&str] = match source {
        "random" => &["source", "dim", "im_upper", "im_spread", "cond_target"],
        "file" => &["source", "path"],
        "oscillator" => &[
            "source", "mass_re", "mass_im", "omega_re", "omega_im", "grid_max", "n_points",
        ],
        "triangular" => &["source"],
        other => return Err(err(format!("unknown hamiltonian source {other:?}"))),
    };
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(err(format!(
                "unknown key {key:?} in hamiltonian source {source:?}"
            )));
        }
    }

    let get_f64 = |key: &str, default: f64| -> Result<f64, ConfigError> {
        match obj.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .ok_or_else(|| err(format!("hamiltonian.{key} must be a number"))),
        }
    };

    match source {
        "random" => {
            let dim = obj
                .get("dim")
                .and_then(|v| v.as_u64())
                .ok_or_else(|| err("random source needs integer \"dim\""))?
                as usize;
            Ok(HamiltonianSource::Random {
                dim,
                im_upper: get_f64("im_upper", 0.5)?,
                im_spread: get_f64("im_spread", 1.0)?,
                cond_target: get_f64("cond_target", 50.0)?,
            })
        }
        "file" => {
            let path = obj
                .get("path")
                .and_then(|v| v.as_str())
                .ok_or_else(|| err("file source needs string \"path\""))?;
            Ok(HamiltonianSource::File {
                path: path.to_string(),
            })
        }
        "oscillator" => {
            let n_points = obj
                .get("n_points")
                .and_then(|v| v.as_u64())
                .unwrap_or(512) as usize;
            Ok(HamiltonianSource::Oscillator {
                mass: Complex64::new(get_f64("mass_re", 1.0)?, get_f64("mass_im", 0.0)?),
                omega: Complex64::new(get_f64("omega_re", 1.0)?, get_f64("omega_im", 0.0)?),
                grid_max: get_f64("grid_max", 8.0)?,
                n_points,
            })
        }
        "triangular" => Ok(HamiltonianSource::Triangular),
        _ => unreachable!(),
    }
}
