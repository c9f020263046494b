//! Both angle presets through the full spectral pipeline.

use cqed_bell::bell::AngleSet;
use cqed_bell::chsh::{chsh_simulated, Pipeline};
use cqed_bell::readout::ExtractionMethod;
use cqed_bell::spectrum::DispersiveParams;

fn main() -> cqed_bell::Result<()> {
    let p = DispersiveParams::reference();
    for method in [ExtractionMethod::NaiveHeight, ExtractionMethod::KernelDeconvolution] {
        let pipeline = Pipeline::standard(&p, method)?;
        for set in [AngleSet::set1(), AngleSet::set2()] {
            println!("{}\n", chsh_simulated(&set, &pipeline)?);
        }
    }
    Ok(())
}
