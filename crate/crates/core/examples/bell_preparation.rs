//! Three-step Bell-state generation and the two-measurement confirmation.

use cqed_bell::bell::{confirm_mixture_baseline, confirm_projective, prepare_bell_traced, BellLabel};
use cqed_bell::quantum::LogicState;

fn show(label: &str, amps: &cqed_bell::quantum::TwoQubitState) {
    let cells: Vec<String> = LogicState::ALL
        .iter()
        .map(|s| {
            let a = amps.amplitude(*s);
            format!("{}: {:+.4}{:+.4}i", s.label(), a.re, a.im)
        })
        .collect();
    println!("{label:<22} {}", cells.join("  "));
}

fn main() {
    let t = prepare_bell_traced();
    show("after rx(π/4) ⊗ rx(π/4)", &t.after_local_rotations);
    show("after iSWAP", &t.after_iswap);
    show("after ry(3π/4) on q1", &t.output);
    println!("fidelity with Φ−: {:.15}", t.output.fidelity(&BellLabel::PhiMinus.state()));

    let c = confirm_projective(&t.output);
    let m = confirm_mixture_baseline();
    println!("\n{:<18} {:>28} {:>28}", "", "direct", "after ry(π/4) ⊗ ry(π/4)");
    println!("{:<18} {:>28} {:>28}", "Bell state", fmt(c.direct), fmt(c.rotated));
    println!("{:<18} {:>28} {:>28}", "|00⟩/|11⟩ mixture", fmt(m.direct), fmt(m.rotated));
}

fn fmt(p: [f64; 4]) -> String {
    p.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" ")
}
