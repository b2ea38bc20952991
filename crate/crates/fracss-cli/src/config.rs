//! Flat key=value run-configuration parsing.
//!
//! Format: one `key = value` pair per line; `#` starts a comment;
//! blank lines are ignored. Keys are case-sensitive. Every constraint
//! of the underlying library is re-checked here so error messages can
//! name the offending key and line.

use std::collections::HashMap;
use std::path::PathBuf;

use fracss::control::{ControllerSpec, Scheme};
use fracss::statespace::FodeModel;

use crate::CliError;

/// Input (or setpoint, when a controller is configured) signal kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputKind {
    /// Unit step: 1 at every sample.
    Step,
    /// All-zero signal.
    Zero,
    /// One number per line read from a file.
    File(PathBuf),
}

/// A fully validated run description.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// The plant.
    pub model: FodeModel,
    /// Discretization scheme for every operator in the run.
    pub scheme: Scheme,
    /// Sampling step in seconds.
    pub t_step: f64,
    /// Number of simulation advances (the CSV gets n_steps + 1 rows).
    pub n_steps: usize,
    /// Input/setpoint signal kind.
    pub input: InputKind,
    /// Present iff any controller key appears: the run is a closed loop.
    pub controller: Option<ControllerSpec>,
    /// Trajectory CSV path; the metadata sidecar appends `.meta.json`.
    pub out: PathBuf,
}

const KNOWN_KEYS: [&str; 16] = [
    "a2", "a1", "a0", "alpha", "beta", "scheme", "memory_samples", "T", "n_steps", "input", "K",
    "Ti", "Td", "lambda", "delta", "out",
];

const CONTROLLER_KEYS: [&str; 5] = ["K", "Ti", "Td", "lambda", "delta"];

struct Entries {
    map: HashMap<String, (usize, String)>,
}

impl Entries {
    fn get(&self, key: &str) -> Option<&(usize, String)> {
        self.map.get(key)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some((line, value)) => value.parse::<f64>().map(Some).map_err(|_| {
                CliError::Config(format!(
                    "key `{key}` (line {line}): `{value}` is not a number"
                ))
            }),
        }
    }

    fn required_f64(&self, key: &str) -> Result<f64, CliError> {
        self.f64(key)?
            .ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    fn usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some((line, value)) => value.parse::<usize>().map(Some).map_err(|_| {
                CliError::Config(format!(
                    "key `{key}` (line {line}): `{value}` is not a non-negative integer"
                ))
            }),
        }
    }
}

fn collect_entries(text: &str) -> Result<Entries, CliError> {
    let mut map: HashMap<String, (usize, String)> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| {
            CliError::Config(format!("line {line}: expected `key = value`, got `{body}`"))
        })?;
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Config(format!("unknown key `{key}` (line {line})")));
        }
        if value.is_empty() {
            return Err(CliError::Config(format!("key `{key}` (line {line}): empty value")));
        }
        if let Some((first_line, _)) = map.insert(key.to_string(), (line, value.to_string())) {
            return Err(CliError::Config(format!(
                "duplicate key `{key}` (lines {first_line} and {line})"
            )));
        }
    }
    Ok(Entries { map })
}

/// Parses and validates a configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let entries = collect_entries(text)?;

    let a2 = entries.required_f64("a2")?;
    let a1 = entries.required_f64("a1")?;
    let a0 = entries.required_f64("a0")?;
    let alpha = entries.required_f64("alpha")?;
    let beta = entries.required_f64("beta")?;
    let model = FodeModel::new(a2, a1, a0, alpha, beta).map_err(|e| match e {
        fracss::Error::Config(msg) => CliError::Config(msg),
        other => CliError::Config(other.to_string()),
    })?;

    let t_step = entries.required_f64("T")?;
    if !t_step.is_finite() || t_step <= 0.0 {
        return Err(CliError::Config(format!(
            "key `T`: step must be finite and positive, got {t_step}"
        )));
    }

    let n_steps = entries.usize("n_steps")?.unwrap_or(300);
    if n_steps == 0 {
        return Err(CliError::Config("key `n_steps`: must be at least 1".into()));
    }

    let scheme = match entries.get("scheme") {
        None => Scheme::Pse { memory_samples: entries_memory(&entries)?.unwrap_or(100) },
        Some((line, value)) => match value.as_str() {
            "pse" => Scheme::Pse { memory_samples: entries_memory(&entries)?.unwrap_or(100) },
            "cfe" => {
                if let Some((mem_line, _)) = entries.get("memory_samples") {
                    return Err(CliError::Config(format!(
                        "key `memory_samples` (line {mem_line}): applies to the pse scheme \
                         only; remove it or set scheme=pse"
                    )));
                }
                Scheme::Cfe
            }
            other => {
                return Err(CliError::Config(format!(
                    "key `scheme` (line {line}): `{other}` is not a scheme (expected pse or cfe)"
                )))
            }
        },
    };

    let input = match entries.get("input") {
        None => InputKind::Step,
        Some((line, value)) => match value.as_str() {
            "step" => InputKind::Step,
            "zero" => InputKind::Zero,
            other => {
                if let Some(path) = other.strip_prefix("file:") {
                    if path.is_empty() {
                        return Err(CliError::Config(format!(
                            "key `input` (line {line}): file: needs a path"
                        )));
                    }
                    InputKind::File(PathBuf::from(path))
                } else {
                    return Err(CliError::Config(format!(
                        "key `input` (line {line}): `{other}` is not an input kind \
                         (expected step, zero, or file:<path>)"
                    )));
                }
            }
        },
    };

    let controller = if CONTROLLER_KEYS.iter().any(|k| entries.get(k).is_some()) {
        let k = entries.f64("K")?.unwrap_or(0.0);
        let ti = entries.f64("Ti")?.unwrap_or(0.0);
        let td = entries.f64("Td")?.unwrap_or(0.0);
        let lambda = entries.f64("lambda")?.unwrap_or(1.0);
        let delta = entries.f64("delta")?.unwrap_or(1.0);
        Some(ControllerSpec::new(k, ti, td, lambda, delta).map_err(|e| match e {
            fracss::Error::Config(msg) => CliError::Config(msg),
            other => CliError::Config(other.to_string()),
        })?)
    } else {
        None
    };

    let out = match entries.get("out") {
        None => PathBuf::from("out.csv"),
        Some((_, value)) => PathBuf::from(value),
    };

    Ok(RunConfig { model, scheme, t_step, n_steps, input, controller, out })
}

fn entries_memory(entries: &Entries) -> Result<Option<usize>, CliError> {
    match entries.usize("memory_samples")? {
        Some(0) => Err(CliError::Config("key `memory_samples`: must be at least 1".into())),
        other => Ok(other),
    }
}
