use std::io::{BufRead, Write};

use super::{normalize, DetuningGrid, Provenance, SpectrumTrace};
use crate::error::{Error, Result};
use crate::units::{mhz, to_mhz};

pub const TRACE_HEADER: &str = "delta_r_over_2pi_MHz,s_ss_normalized";

/// Writes the normalized trace as CSV, one row per grid point. An all-zero
/// trace is written as zeros.
pub fn write_trace_csv<W: Write>(trace: &SpectrumTrace, mut out: W) -> Result<()> {
    let values = match normalize(trace) {
        Ok(n) => n.values,
        Err(Error::ZeroTrace) => trace.values.clone(),
        Err(e) => return Err(e),
    };
    writeln!(out, "{TRACE_HEADER}")?;
    for (d, v) in trace.grid.points().iter().zip(values) {
        writeln!(out, "{},{}", to_mhz(*d), v)?;
    }
    Ok(())
}

pub fn read_trace_csv<R: BufRead>(input: R) -> Result<SpectrumTrace> {
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim() == TRACE_HEADER => {}
        Some((_, Ok(h))) => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header `{TRACE_HEADER}`, found `{h}`"),
            })
        }
        Some((_, Err(e))) => return Err(e.into()),
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "empty trace file".into(),
            })
        }
    }
    let mut grid = Vec::new();
    let mut values = Vec::new();
    for (n, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: n + 1, msg };
        let (d, v) = line
            .split_once(',')
            .ok_or_else(|| err("expected two columns".into()))?;
        let d: f64 = d.trim().parse().map_err(|_| err(format!("bad detuning `{d}`")))?;
        let v: f64 = v.trim().parse().map_err(|_| err(format!("bad value `{v}`")))?;
        grid.push(mhz(d));
        values.push(v);
    }
    Ok(SpectrumTrace {
        grid: DetuningGrid::new(grid)?,
        values,
        provenance: Provenance::Imported,
        source: None,
    })
}
