//! Experiment configuration, loadable from JSON or assembled from flags.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use detlev::SelectionMethod;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io::MatrixFormat;
use crate::synthetic::SyntheticSource;
use crate::OutputFormat;

pub const DEFAULT_REPETITIONS: usize = 10;
pub const DEFAULT_BASIS_EPSILON: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum InputSource {
    File {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        format: Option<MatrixFormat>,
    },
    /// One matrix per `k`, generated with the experiment seed.
    Synthetic(SyntheticSource),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Spectral,
    Frobenius,
    #[default]
    Both,
}

impl Norm {
    pub fn includes_spectral(self) -> bool {
        self != Self::Frobenius
    }

    pub fn includes_frobenius(self) -> bool {
        self != Self::Spectral
    }
}

/// Basis used by the `approx-basis` method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisArg {
    #[default]
    FrequentDirections,
    Rangefinder,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sweep<'a> {
    Columns(&'a [usize]),
    Thresholds(&'a [f64]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub input: InputSource,
    pub k_list: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_list: Option<Vec<f64>>,
    #[serde(default = "default_methods")]
    pub methods: Vec<SelectionMethod>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub norm: Norm,
    /// Accuracy of the approximate basis.
    #[serde(default = "default_basis_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub basis: BasisArg,
    /// Not echoed into reports, so output bytes do not depend on it.
    #[serde(default, skip_serializing)]
    pub output_path: Option<PathBuf>,
    #[serde(default, skip_serializing)]
    pub output_format: OutputFormat,
}

fn default_methods() -> Vec<SelectionMethod> {
    vec![SelectionMethod::DeterministicLeverage]
}

fn default_repetitions() -> usize {
    DEFAULT_REPETITIONS
}

fn default_basis_epsilon() -> f64 {
    DEFAULT_BASIS_EPSILON
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn strictly_ascending<T: PartialOrd>(values: &[T]) -> bool {
    values.windows(2).all(|w| w[0] < w[1])
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::parse(path, e.line(), e.to_string()))
    }

    pub fn sweep(&self) -> Sweep<'_> {
        match (&self.c_list, &self.theta_list) {
            (Some(c), _) => Sweep::Columns(c),
            (None, Some(t)) => Sweep::Thresholds(t),
            (None, None) => Sweep::Columns(&[]),
        }
    }

    /// Checks the invariants: repetitions ≥ 1, exactly one sweep list,
    /// every list nonempty and strictly ascending.
    pub fn validate(&self) -> CliResult<()> {
        if let InputSource::Synthetic(source) = &self.input {
            source.validate()?;
        }
        if self.repetitions == 0 {
            return Err(usage("repetitions must be at least 1"));
        }
        if self.k_list.is_empty() || self.k_list[0] == 0 || !strictly_ascending(&self.k_list) {
            return Err(usage("k list must be nonempty, positive and strictly ascending"));
        }
        match (&self.c_list, &self.theta_list) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(usage("give exactly one of a c list or a theta list"))
            }
            (Some(c), None) => {
                if c.is_empty() || c[0] == 0 || !strictly_ascending(c) {
                    return Err(usage("c list must be nonempty, positive and strictly ascending"));
                }
            }
            (None, Some(t)) => {
                let valid = t.iter().all(|x| x.is_finite() && *x > 0.0);
                if t.is_empty() || !valid || !strictly_ascending(t) {
                    return Err(usage("theta list must be nonempty, positive and strictly ascending"));
                }
            }
        }
        if self.methods.is_empty() {
            return Err(usage("at least one method is required"));
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(usage("methods must not repeat"));
        }
        let eps_ok = match self.basis {
            BasisArg::FrequentDirections => self.epsilon > 0.0 && self.epsilon <= 1.0,
            BasisArg::Rangefinder => self.epsilon > 0.0 && self.epsilon < 1.0,
        };
        if !eps_ok {
            return Err(CliError::Domain(detlev::Error::InvalidEpsilon(self.epsilon)));
        }
        Ok(())
    }
}

/// Parses a selector tag such as `deterministic-leverage`.
pub fn parse_method(tag: &str) -> Result<SelectionMethod, String> {
    SelectionMethod::from_tag(tag).ok_or_else(|| {
        let known: Vec<&str> = SelectionMethod::ALL.iter().map(|m| m.tag()).collect();
        format!("unknown method '{tag}', expected one of {}", known.join(", "))
    })
}
