use serde::{Deserialize, Serialize};

use super::ScenarioFile;
use crate::distinguish::{Discrimination, TestResult};
use crate::engine::{RunReport, SupportCertificate, Theory};
use crate::qlin::{CMatrix, DensityMatrix, C64};
use crate::Result;

/// Dense complex matrix as separate real and imaginary row lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub factor_dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&DensityMatrix> for MatrixRecord {
    fn from(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let rows = |f: fn(&C64) -> f64| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect();
        Self {
            factor_dims: rho.factor_dims().to_vec(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

impl MatrixRecord {
    pub fn to_density(&self) -> Result<DensityMatrix> {
        let n = self.re.len();
        if self.im.len() != n || self.re.iter().chain(&self.im).any(|r| r.len() != n) {
            return Err(crate::Error::DimensionMismatch("ragged matrix record".into()));
        }
        let m = CMatrix::from_fn(n, n, |i, j| C64::new(self.re[i][j], self.im[i][j]));
        DensityMatrix::new(m, self.factor_dims.clone())
    }
}

/// Serialized form of a [`RunReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub theory: Theory,
    pub n_qubits: u32,
    pub n_streams: usize,
    pub observer_dim: usize,
    pub rho_s: MatrixRecord,
    pub per_stream_ranks: Vec<usize>,
    pub rank_rho_s: usize,
    pub fs_dim: Option<usize>,
    pub eigenvalues: Vec<f64>,
    pub trace_distance_to_mixed: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collapse_bits: Option<Vec<Vec<u8>>>,
}

impl From<&RunReport> for RunRecord {
    fn from(r: &RunReport) -> Self {
        Self {
            theory: r.theory,
            n_qubits: r.n_qubits,
            n_streams: r.n_streams,
            observer_dim: r.observer_dim,
            rho_s: MatrixRecord::from(&r.rho_s),
            per_stream_ranks: r.per_stream_ranks.clone(),
            rank_rho_s: r.rank_rho_s,
            fs_dim: r.fs_dim,
            eigenvalues: r.eigenvalues.clone(),
            trace_distance_to_mixed: r.trace_distance_to_mixed,
            collapse_bits: r.collapse_bits.clone(),
        }
    }
}

impl RunRecord {
    pub fn to_report(&self) -> Result<RunReport> {
        Ok(RunReport {
            theory: self.theory,
            n_qubits: self.n_qubits,
            n_streams: self.n_streams,
            observer_dim: self.observer_dim,
            rho_s: self.rho_s.to_density()?,
            per_stream_ranks: self.per_stream_ranks.clone(),
            rank_rho_s: self.rank_rho_s,
            fs_dim: self.fs_dim,
            eigenvalues: self.eigenvalues.clone(),
            trace_distance_to_mixed: self.trace_distance_to_mixed,
            collapse_bits: self.collapse_bits.clone(),
        })
    }
}

/// Output of `run`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool_version: String,
    pub wall_time_ms: u64,
    pub scenario: ScenarioFile,
    pub run: RunRecord,
    pub fs_dim: Option<usize>,
    /// Largest `<chi|rho_S|chi>` over `F_S^perp`.
    pub perp_expectations: Option<f64>,
    pub certificate: Option<SupportCertificate>,
    pub bound_informative: bool,
    pub test: Option<TestResult>,
}

/// Output of `discriminate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationFile {
    pub tool_version: String,
    pub wall_time_ms: u64,
    pub scenario: ScenarioFile,
    pub samples: usize,
    pub alpha: f64,
    pub seed: u64,
    pub fs_dim: usize,
    pub perp_dim: usize,
    pub bound_vacuous: bool,
    pub discriminating: bool,
    pub warnings: Vec<String>,
    pub everett: RunRecord,
    pub copenhagen: RunRecord,
    pub everett_test: Option<TestResult>,
    pub copenhagen_test: Option<TestResult>,
}

impl DiscriminationFile {
    pub fn new(scenario: ScenarioFile, samples: usize, alpha: f64, seed: u64, d: &Discrimination, wall_time_ms: u64) -> Self {
        Self {
            tool_version: crate::TOOL_VERSION.to_string(),
            wall_time_ms,
            scenario,
            samples,
            alpha,
            seed,
            fs_dim: d.fs_dim,
            perp_dim: d.perp_dim,
            bound_vacuous: d.bound_vacuous,
            discriminating: d.discriminating(),
            warnings: d.warnings.clone(),
            everett: RunRecord::from(&d.everett_report),
            copenhagen: RunRecord::from(&d.copenhagen_report),
            everett_test: d.everett.clone(),
            copenhagen_test: d.copenhagen.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_copenhagen, run_everett, Scenario};

    #[test]
    fn run_record_round_trips_exactly() {
        for report in [
            run_everett(&Scenario::toy(3, Theory::Everett)).unwrap(),
            run_copenhagen(&Scenario::toy(3, Theory::Copenhagen)).unwrap(),
        ] {
            let text = serde_json::to_string(&RunRecord::from(&report)).unwrap();
            let back: RunRecord = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_report().unwrap(), report);
        }
    }
}
