//! Exhaustive search of the CHSH function on a 16-point angle grid.

use std::fs::File;
use std::io::BufWriter;

use cqed_bell::chsh::{chsh_scan, Pipeline, ScanSource, TSIRELSON_BOUND};
use cqed_bell::readout::ExtractionMethod;
use cqed_bell::spectrum::DispersiveParams;

fn main() -> cqed_bell::Result<()> {
    let analytic = chsh_scan(16, ScanSource::Analytic, false)?;
    analytic.write_landscape_csv(BufWriter::new(File::create("landscape_analytic.csv")?))?;
    println!("analytic maximum {:.6} (2√2 = {TSIRELSON_BOUND:.6})", analytic.best.f);

    let pipeline = Pipeline::standard(&DispersiveParams::reference(), ExtractionMethod::KernelDeconvolution)?;
    let simulated = chsh_scan(16, ScanSource::Simulated(&pipeline), false)?;
    println!("simulated maximum {:.6}\n{}", simulated.best.f, simulated.best);

    let restricted = chsh_scan(16, ScanSource::Analytic, true)?;
    println!("\nwith θ1' = θ1 and θ2' = θ2 the maximum is {:.6}", restricted.best.f);
    Ok(())
}
