//! Overlap bias of the naive peak-height reading as the linewidth grows.

use cqed_bell::bell::{analytic_correlation, AngleSet};
use cqed_bell::chsh::{chsh_analytic, chsh_simulated, Pipeline};
use cqed_bell::readout::ExtractionMethod;
use cqed_bell::spectrum::DispersiveParams;
use cqed_bell::units::mhz;

fn main() -> cqed_bell::Result<()> {
    let set = AngleSet::set2();
    let exact = chsh_analytic(&set);
    println!("analytic f = {exact:.6}, E(θ1, θ2) = {:.6}", analytic_correlation(set.theta1, set.theta2));
    println!("{:>8} {:>12} {:>12} {:>12}", "κ/2π", "naive f", "kernel f", "kernel cond");
    for kappa in [0.1, 0.25, 0.5, 1.0, 1.5, 2.0] {
        let p = DispersiveParams::reference().with_kappa(mhz(kappa))?;
        let naive = chsh_simulated(&set, &Pipeline::standard(&p, ExtractionMethod::NaiveHeight)?)?;
        let kernel = chsh_simulated(&set, &Pipeline::standard(&p, ExtractionMethod::KernelDeconvolution)?)?;
        let cond = {
            let trace = cqed_bell::spectrum::lorentzian_from_probabilities(
                &[0.25; 4],
                &p,
                &cqed_bell::spectrum::DetuningGrid::standard(),
            );
            cqed_bell::readout::extract_probs_kernel(&trace, &p)?.condition_number.unwrap_or(f64::NAN)
        };
        println!("{kappa:>8.2} {:>12.6} {:>12.6} {cond:>12.3}", naive.f, kernel.f);
    }
    Ok(())
}
