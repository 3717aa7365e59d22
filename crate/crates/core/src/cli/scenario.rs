use serde::{Deserialize, Serialize};

use super::CliError;
use crate::engine::{Scenario, Theory};
use crate::observer::{ObserverKind, ObserverSpec};
use crate::qlin::{CVector, StateVector, C64};

/// Scenario document as read from disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub n_qubits: u32,
    pub n_streams: usize,
    pub observer: ObserverFile,
    #[serde(default = "default_theory")]
    pub theory: Theory,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverFile {
    pub kind: ObserverKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_qubits: Option<u32>,
    /// `[re, im]` pairs; rescaled to unit norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<Vec<[f64; 2]>>,
}

fn default_theory() -> Theory {
    Theory::Everett
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))
    }

    pub fn to_scenario(&self) -> Result<Scenario, CliError> {
        let bad = |msg: String| CliError::Schema(msg);
        if self.n_qubits == 0 {
            return Err(bad("n_qubits must be positive".into()));
        }
        if self.n_streams == 0 {
            return Err(bad("n_streams must be positive".into()));
        }
        let obs = &self.observer;
        let dim = match (obs.kind, obs.dim, obs.memory_qubits) {
            (_, Some(0), _) => return Err(bad("observer.dim must be positive".into())),
            (_, Some(d), _) => d,
            (ObserverKind::Toy, None, _) => 2,
            (ObserverKind::Recording, None, Some(mem)) => 1usize
                .checked_shl(mem)
                .ok_or_else(|| bad(format!("observer.memory_qubits = {mem} is too large")))?,
            (ObserverKind::Recording, None, None) => {
                return Err(bad("recording observer needs observer.memory_qubits or observer.dim".into()))
            }
            (ObserverKind::Random, None, _) => return Err(bad("random observer needs observer.dim".into())),
        };
        let initial = match &obs.initial_state {
            Some(pairs) => {
                let v = CVector::from_iterator(pairs.len(), pairs.iter().map(|[re, im]| C64::new(*re, *im)));
                Some(StateVector::normalized(v, vec![pairs.len()]).map_err(|e| bad(format!("observer.initial_state: {e}")))?)
            }
            None => None,
        };
        let spec = ObserverSpec::new(obs.kind, dim, obs.memory_qubits, initial, obs.seed.unwrap_or(self.seed))
            .map_err(|e| bad(format!("observer: {e}")))?;
        if let Some(alpha) = self.alpha {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(bad(format!("alpha must lie in (0, 1), got {alpha}")));
            }
        }
        Scenario::new(self.n_qubits, self.n_streams, spec, self.theory, self.seed).map_err(|e| bad(e.to_string()))
    }
}
