//! Tolerances, from defaults, an optional TOML file and `--tol`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Hermiticity and unit trace of loaded states.
    pub state: f64,
    /// Lowest eigenvalue allowed in a loaded state.
    pub psd: f64,
    /// Purity decisions.
    pub purity: f64,
    /// Separability verdicts.
    pub separability: f64,
    /// Arrangement equivalence.
    pub equivalence: f64,
    /// Projector checks and commutation.
    pub commutation: f64,
    /// Additivity of valuations.
    pub axioms: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            state: qlab::states::STATE_TOL,
            psd: qlab::states::PSD_TOL,
            purity: qlab::states::STATE_TOL,
            separability: qlab::entanglement::SEPARABILITY_TOL,
            equivalence: 1e-10,
            commutation: qlab::powers::PROJECTOR_TOL,
            axioms: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            state: tol,
            psd: tol,
            purity: tol,
            separability: tol,
            equivalence: tol,
            commutation: tol,
            axioms: tol,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    tolerances: Tolerances,
}

/// Defaults, overlaid by `config` and then by `tol`.
pub fn resolve(config: Option<&Path>, tol: Option<f64>) -> CliResult<Tolerances> {
    if let Some(t) = tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::validation(format!("--tol must be a nonnegative number, got {t}")));
        }
        return Ok(Tolerances::uniform(t));
    }
    let Some(path) = config else {
        return Ok(Tolerances::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let file: ConfigFile =
        toml::from_str(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    Ok(file.tolerances)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_keeps_defaults() {
        let file: ConfigFile = toml::from_str("[tolerances]\nseparability = 1e-6\n").unwrap();
        assert_eq!(file.tolerances.separability, 1e-6);
        assert_eq!(file.tolerances.state, Tolerances::default().state);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<ConfigFile>("[tolerances]\nfoo = 1.0\n").is_err());
    }

    #[test]
    fn tol_flag_wins() {
        assert_eq!(resolve(None, Some(1e-4)).unwrap(), Tolerances::uniform(1e-4));
        assert!(resolve(None, Some(-1.0)).is_err());
    }
}
