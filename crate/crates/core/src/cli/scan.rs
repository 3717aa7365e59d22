use serde::Serialize;

use super::CliError;
use crate::distinguish::derive_seed;
use crate::engine::{run_everett_with_limit, Scenario, Theory};
use crate::observer::{ObserverKind, ObserverSpec};

/// Observer family selected on the command line: `toy`,
/// `recording:<memory qubits>` or `random:<dim>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanObserver {
    Toy,
    Recording(u32),
    Random(usize),
}

impl std::str::FromStr for ScanObserver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<usize, String> {
            a.ok_or_else(|| format!("observer {kind:?} needs a size, e.g. {kind}:2"))?
                .parse::<usize>()
                .map_err(|e| format!("bad observer size: {e}"))
        };
        match kind {
            "toy" => Ok(Self::Toy),
            "recording" => Ok(Self::Recording(num(arg)? as u32)),
            "random" => Ok(Self::Random(num(arg)?)),
            other => Err(format!("unknown observer kind {other:?} (toy, recording:<mem>, random:<dim>)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    #[serde(rename = "N")]
    pub n_qubits: u32,
    #[serde(rename = "D")]
    pub observer_dim: usize,
    pub rank: usize,
    pub trace_distance_to_mixed: f64,
}

pub struct ScanConfig {
    pub observer: ScanObserver,
    pub n_min: u32,
    pub n_max: u32,
    pub trials: usize,
    pub streams: usize,
    pub seed: u64,
    pub max_joint_dim: usize,
}

/// One no-collapse run per `(N, trial)`, ordered by `N` then trial.
pub fn scan(cfg: &ScanConfig) -> Result<Vec<ScanRow>, CliError> {
    if cfg.n_min == 0 || cfg.n_min > cfg.n_max {
        return Err(CliError::Usage(format!("need 1 <= n-min <= n-max, got {}..{}", cfg.n_min, cfg.n_max)));
    }
    if cfg.trials == 0 || cfg.streams == 0 {
        return Err(CliError::Usage("--trials and --streams must be positive".into()));
    }
    let mut rows = Vec::new();
    for n in cfg.n_min..=cfg.n_max {
        for trial in 0..cfg.trials {
            let trial_seed = derive_seed(cfg.seed, trial as u64);
            let spec = match cfg.observer {
                ScanObserver::Toy => ObserverSpec::toy(),
                ScanObserver::Recording(mem) => ObserverSpec::recording(mem)?,
                ScanObserver::Random(dim) => ObserverSpec::new(ObserverKind::Random, dim, None, None, trial_seed)?,
            };
            let sc = Scenario::new(n, cfg.streams, spec, Theory::Everett, trial_seed)?;
            let report = run_everett_with_limit(&sc, cfg.max_joint_dim)?;
            rows.push(ScanRow {
                n_qubits: n,
                observer_dim: report.observer_dim,
                rank: report.rank_rho_s,
                trace_distance_to_mixed: report.trace_distance_to_mixed,
            });
        }
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[ScanRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["N", "D", "rank", "trace_distance_to_mixed"])?;
    for r in rows {
        w.write_record([
            r.n_qubits.to_string(),
            r.observer_dim.to_string(),
            r.rank.to_string(),
            format_sig12(r.trace_distance_to_mixed),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// `%.12g`: 12 significant digits, trailing zeros trimmed, exponent form
/// outside `1e-5 <= |x| < 1e12`.
pub fn format_sig12(x: f64) -> String {
    const P: i32 = 12;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // Exponent after rounding to P significant digits.
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..P).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
