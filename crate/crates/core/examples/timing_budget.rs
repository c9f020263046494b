//! Pulse durations of the protocol and the budget against T2.

use cqed_bell::bell::AngleSet;
use cqed_bell::config::DeviceConfig;
use cqed_bell::schedule::{full_budget, BudgetPolicy};

fn main() -> cqed_bell::Result<()> {
    let device = DeviceConfig::reference();
    for w in device.warnings() {
        println!("warning: {w}");
    }
    println!("{}", full_budget(&device, &BudgetPolicy::default())?);

    let with_encoding = BudgetPolicy {
        encoding_angles: Some(AngleSet::set1()),
        ..BudgetPolicy::default()
    };
    let s = full_budget(&device, &with_encoding)?;
    println!("\nincluding the set-1 encoding rotations: total {:.2} ns", s.total_ns);
    Ok(())
}
