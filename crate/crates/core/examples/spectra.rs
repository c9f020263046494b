//! Transmission spectra of the Bell state and of its encoded versions,
//! written as CSV next to the working directory.

use std::fs::File;
use std::io::BufWriter;

use cqed_bell::bell::{encode, prepare_bell, AngleSet, BellLabel};
use cqed_bell::readout::local_maxima;
use cqed_bell::spectrum::{closed_form_spectrum, write_trace_csv, DetuningGrid, DispersiveParams};
use cqed_bell::units::to_mhz;

fn main() -> cqed_bell::Result<()> {
    let p = DispersiveParams::reference();
    let grid = DetuningGrid::standard();

    let mut cases = vec![
        ("phi_minus".to_string(), BellLabel::PhiMinus.state()),
        ("psi_plus".to_string(), BellLabel::PsiPlus.state()),
    ];
    for (name, set) in [("set1", AngleSet::set1()), ("set2", AngleSet::set2())] {
        for (k, (a, b)) in set.pairs().into_iter().enumerate() {
            cases.push((format!("{name}_pair{k}"), encode(&prepare_bell(), a, b)));
        }
    }

    for (name, state) in cases {
        let trace = closed_form_spectrum(&state, &p, &grid)?;
        let path = format!("spectrum_{name}.csv");
        write_trace_csv(&trace, BufWriter::new(File::create(&path)?))?;
        let peaks: Vec<String> = local_maxima(&trace)?
            .into_iter()
            .filter(|(_, h)| *h > 0.05)
            .map(|(x, h)| format!("{:+.1} MHz ({h:.3})", to_mhz(x)))
            .collect();
        println!("{path:<28} peaks: {}", peaks.join(", "));
    }
    Ok(())
}
