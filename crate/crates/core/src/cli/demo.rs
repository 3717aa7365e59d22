use std::collections::BTreeSet;
use std::fmt::Write;

use crate::distinguish::{perp_hit_test, sample_outcomes, MeasurementBasis};
use crate::engine::{compute_fs, run_copenhagen, run_everett, Scenario, Theory};
use crate::observer::make_toy_unitary;
use crate::Result;

const DEMO_STREAMS: usize = 4;
const DEMO_SAMPLES: usize = 1000;
const DEMO_SEED: u64 = 2024;

// Avoids printing "-0.000000" for round-off below display precision.
fn prob(p: f64) -> f64 {
    if p.abs() < 5e-13 {
        0.0
    } else {
        p
    }
}

/// Human-readable walk through the three-qubit worked example.
pub fn toy_demo_text() -> Result<String> {
    let everett = run_everett(&Scenario::toy(DEMO_STREAMS, Theory::Everett))?;
    let collapse = run_copenhagen(&Scenario::toy(DEMO_STREAMS, Theory::Copenhagen))?;
    let fs = compute_fs(&make_toy_unitary())?;
    let ab = MeasurementBasis::toy_ab();

    let mut s = String::new();
    let w = &mut s;
    writeln!(w, "Toy observer: N = 3 stream qubits, observer dimension D = 2 (2^N = 8 > D^2 = 4)").unwrap();
    writeln!(w, "Interaction U on H_S (x) H_O, observer basis {{|psi0>, |psi1>}}:").unwrap();
    writeln!(w, "  U |+++>|psi0> = (|A_1>|psi0> + |A_2>|psi1>)/sqrt(2)").unwrap();
    writeln!(w, "  U |+++>|psi1> = (|A_3>|psi0> + |A_4>|psi1>)/sqrt(2)").unwrap();
    writeln!(w, "A states:").unwrap();
    writeln!(w, "  A_1 = (|000> + |001> + |010> + |011>)/2").unwrap();
    writeln!(w, "  A_2 = (|100> + |101> + |110> + |111>)/2").unwrap();
    writeln!(w, "  A_3 = (|000> - |001> + |010> - |011>)/2").unwrap();
    writeln!(w, "  A_4 = (|100> - |101> + |110> - |111>)/2").unwrap();
    writeln!(w, "B states (orthogonal to every A state):").unwrap();
    writeln!(w, "  B_1 = (|000> - |010>)/sqrt(2) = |0>|->|0>").unwrap();
    writeln!(w, "  B_2 = (|001> - |011>)/sqrt(2) = |0>|->|1>").unwrap();
    writeln!(w, "  B_3 = (|100> - |110>)/sqrt(2) = |1>|->|0>").unwrap();
    writeln!(w, "  B_4 = (|101> - |111>)/sqrt(2) = |1>|->|1>").unwrap();
    writeln!(w).unwrap();
    writeln!(w, "No-collapse evolution, m = {DEMO_STREAMS} streams, observer starts in |psi0>").unwrap();
    writeln!(w, "Canonical basis probabilities:").unwrap();
    for (k, p) in everett.rho_s.diagonal().iter().enumerate() {
        writeln!(w, "  P(|{k:03b}>) = {:.6}", prob(*p)).unwrap();
    }
    writeln!(w, "{{A,B}} basis probabilities:").unwrap();
    let probs = ab.probabilities(&everett.rho_s)?;
    for (label, p) in ab.labels().iter().zip(&probs) {
        let (letter, idx) = label.split_at(1);
        writeln!(w, "  P({letter}_{idx}) = {:.6}", prob(*p)).unwrap();
    }
    writeln!(w, "rank(rho_S) = {}", everett.rank_rho_s).unwrap();
    writeln!(w, "dim F_S = {}", fs.dim()).unwrap();
    writeln!(w, "trace distance to I/8 = {:.6}", everett.trace_distance_to_mixed).unwrap();
    writeln!(w).unwrap();

    let b_labels: BTreeSet<String> = ["B1", "B2", "B3", "B4"].map(String::from).into();
    writeln!(w, "{DEMO_SAMPLES} samples in the {{A,B}} basis (seed {DEMO_SEED}):").unwrap();
    for (name, rho, seed) in [
        ("no-collapse", &everett.rho_s, DEMO_SEED),
        ("collapse   ", &collapse.rho_s, DEMO_SEED + 1),
    ] {
        let samples = sample_outcomes(rho, &ab, DEMO_SAMPLES, seed)?;
        let t = perp_hit_test(&samples, &ab, &b_labels, 1e-6)?;
        writeln!(
            w,
            "  {name}: B hits = {:4}, p-value under collapse = {:.3e}",
            t.perp_hits, t.p_value_under_copenhagen
        )
        .unwrap();
    }
    Ok(s)
}
