//! Synthetic instances shared by `synth` and `experiment`.

use clap::ValueEnum;
use detlev::synthgen::{generate, near_uniform_targets, power_law_targets, ProfileKind};
use detlev::{leverage_scores, SyntheticInstance, SyntheticSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileArg {
    NearUniform,
    PowerLaw,
}

/// Shape of a generated matrix; `k` is supplied per instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSource {
    pub m: usize,
    pub n: usize,
    pub profile: ProfileArg,
    /// Power-law exponent; required for `power-law`, rejected otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl SyntheticSource {
    pub fn validate(&self) -> CliResult<()> {
        match (self.profile, self.alpha) {
            (ProfileArg::PowerLaw, None) => Err(CliError::Usage("power-law profile requires --alpha".into())),
            (ProfileArg::NearUniform, Some(_)) => {
                Err(CliError::Usage("--alpha applies only to the power-law profile".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match (self.profile, self.alpha) {
            (ProfileArg::PowerLaw, Some(alpha)) => format!("power-law(alpha={alpha})"),
            _ => "near-uniform".to_string(),
        }
    }
}

/// Target profile metadata written next to a generated matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSidecar {
    pub kind: ProfileKind,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub alpha: Option<f64>,
    pub capped: bool,
    pub pinned: usize,
    /// Leading power-law score before capping; absent for near-uniform.
    pub raw_leading: Option<f64>,
    pub targets: Vec<f64>,
    /// Leverage scores of the prescribed right singular block.
    pub realized: Vec<f64>,
}

/// Generates the instance for `(source, k, seed)`. Near-uniform targets
/// are drawn from `seed` itself; the generator derives its own streams.
pub fn build(source: &SyntheticSource, k: usize, seed: u64) -> CliResult<(SyntheticInstance, ProfileSidecar)> {
    source.validate()?;
    let (kind, targets, capped, pinned, raw_leading) = match source.profile {
        ProfileArg::NearUniform => {
            (ProfileKind::NearUniform, near_uniform_targets(source.n, k, seed)?, false, 0, None)
        }
        ProfileArg::PowerLaw => {
            let alpha = source.alpha.unwrap_or_default();
            let p = power_law_targets(source.n, k, alpha)?;
            (ProfileKind::PowerLaw, p.targets, p.capped, p.pinned, Some(p.raw_leading))
        }
    };
    let spec = SyntheticSpec { m: source.m, n: source.n, k, targets, seed, profile_kind: kind };
    let instance = generate(&spec)?;
    let realized = leverage_scores(&instance.v_k, k)?.scores().to_vec();
    let sidecar = ProfileSidecar {
        kind,
        m: source.m,
        n: source.n,
        k,
        seed,
        alpha: source.alpha,
        capped,
        pinned,
        raw_leading,
        targets: spec.targets,
        realized,
    };
    Ok((instance, sidecar))
}
