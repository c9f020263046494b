//! Closed form, Lorentzian mixture and master equation on the same random
//! states.

use rand::rngs::StdRng;
use rand::SeedableRng;

use cqed_bell::quantum::TwoQubitState;
use cqed_bell::spectrum::{
    closed_form_spectrum, closed_form_spectrum_with, lorentzian_spectrum, ATerm, DetuningGrid,
    DispersiveParams, LindbladSweep, DEFAULT_N_MAX,
};

fn main() -> cqed_bell::Result<()> {
    let p = DispersiveParams::reference();
    let grid = DetuningGrid::uniform(-0.16, 0.16, 801)?;
    let sweep = LindbladSweep::new(&p, &grid, DEFAULT_N_MAX)?;
    let mut rng = StdRng::seed_from_u64(11);

    println!("{:>5} {:>14} {:>14} {:>16}", "state", "closed-lorentz", "lindblad-lorentz", "unsquared A-term");
    for k in 0..5 {
        let s = TwoQubitState::random(&mut rng);
        let lorentz = lorentzian_spectrum(&s, &p, &grid);
        let closed = closed_form_spectrum(&s, &p, &grid)?;
        let lindblad = sweep.trace(&s);
        let unsquared = closed_form_spectrum_with(&s, &p, &grid, ATerm::Unsquared)
            .and_then(|t| t.max_normalized_deviation(&lorentz))
            .map_or_else(|e| e.to_string(), |d| format!("{d:.3e}"));
        println!(
            "{k:>5} {:>14.3e} {:>14.3e} {:>16}",
            closed.max_normalized_deviation(&lorentz)?,
            lindblad.max_normalized_deviation(&lorentz)?,
            unsquared
        );
    }
    Ok(())
}
