//! Joint probabilities and correlations read off a transmission spectrum.
//!
//! Each logic state |kl⟩ is marked by a peak at its pull s_kl, and the
//! relative peak heights give the probabilities. Two readers are provided:
//!
//! * **naive-height**: the normalized trace is read at the grid point nearest
//!   each expected pull, the trace floor (its minimum over the grid) is
//!   subtracted, and a pull with no local maximum within κ/2 of it counts as
//!   an absent peak of height zero. The four heights are then normalized to
//!   sum to one. Tails of neighbouring Lorentzians bias these readings toward
//!   each other, which is what pulls cos(5π/4) = −0.7071 to about −0.704.
//! * **kernel-deconvolution**: the raw readings h_i are modeled as
//!   h_i = Σ_j K_ij P_j with K_ij = 1/((x_i − s_j)² + κ²/4), x_i the grid point
//!   actually read. Solving the 4×4 system removes the overlap bias exactly
//!   for a Lorentzian-mixture trace.
//!
//! A third method, **exact**, bypasses the spectrum and takes the
//! probabilities of the state that generated the trace; it is the analytic
//! reference.
//!
//! Pulls closer than κ/10 are merged into one reading carrying the pair's
//! combined probability.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::LogicState;
use crate::spectrum::{normalize, DispersiveParams, SpectrumTrace};
use crate::units::to_mhz;

/// Pulls closer than this fraction of κ are read as a single peak.
pub const MERGE_FRACTION: f64 = 0.1;
/// Kernel matrices with a larger 2-norm condition number are not inverted.
pub const MAX_KERNEL_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtractionMethod {
    NaiveHeight,
    KernelDeconvolution,
    Exact,
}

impl ExtractionMethod {
    pub fn name(self) -> &'static str {
        match self {
            ExtractionMethod::NaiveHeight => "naive-height",
            ExtractionMethod::KernelDeconvolution => "kernel-deconvolution",
            ExtractionMethod::Exact => "exact",
        }
    }
}

impl fmt::Display for ExtractionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ExtractionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" | "naive-height" => Ok(ExtractionMethod::NaiveHeight),
            "kernel" | "kernel-deconvolution" => Ok(ExtractionMethod::KernelDeconvolution),
            "exact" => Ok(ExtractionMethod::Exact),
            other => Err(Error::InvalidArgument(format!("unknown extraction method `{other}`"))),
        }
    }
}

/// One spectral reading; `states` has two entries for a merged peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakRow {
    pub states: Vec<LogicState>,
    /// Expected pull (rad/ns).
    pub shift: f64,
    /// Reading on the normalized trace.
    pub height: f64,
    pub probability: f64,
    /// A local maximum exists near the expected pull.
    pub peak_found: bool,
}

impl PeakRow {
    pub fn label(&self) -> String {
        self.states.iter().map(|s| s.label()).collect::<Vec<_>>().join("+")
    }

    pub fn is_merged(&self) -> bool {
        self.states.len() > 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakTable {
    pub rows: Vec<PeakRow>,
    pub method: ExtractionMethod,
    /// Trace floor subtracted by the naive reader.
    pub floor: Option<f64>,
    /// Condition number of the kernel matrix.
    pub condition_number: Option<f64>,
    /// Total negative probability removed by clamping, relative to the
    /// absolute sum before clamping.
    pub clamp_residual: Option<f64>,
    pub notes: Vec<String>,
}

impl PeakTable {
    /// Per-state probabilities; a merged reading is split evenly between its
    /// states.
    pub fn probabilities(&self) -> [f64; 4] {
        let mut p = [0.0; 4];
        for row in &self.rows {
            let share = row.probability / row.states.len() as f64;
            for s in &row.states {
                p[s.index()] += share;
            }
        }
        p
    }

    pub fn has_merged_peaks(&self) -> bool {
        self.rows.iter().any(PeakRow::is_merged)
    }

    /// CSV with columns state, shift/2π (MHz), height, probability, method.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "state,shift_over_2pi_MHz,height,probability,method")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.label(),
                to_mhz(r.shift),
                r.height,
                r.probability,
                self.method
            )?;
        }
        Ok(())
    }
}

/// E = P_same − P_diff with the probabilities it was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub value: f64,
    pub method: ExtractionMethod,
    pub probs: [f64; 4],
}

impl CorrelationEstimate {
    pub fn from_probabilities(probs: [f64; 4], method: ExtractionMethod) -> Self {
        Self {
            value: correlation_value(&probs),
            method,
            probs,
        }
    }
}

/// (P00 + P11) − (P01 + P10), clamped to [−1, 1] against rounding.
pub fn correlation_value(p: &[f64; 4]) -> f64 {
    ((p[0] + p[3]) - (p[1] + p[2])).clamp(-1.0, 1.0)
}

struct PullGroup {
    states: Vec<LogicState>,
    shift: f64,
}

fn group_pulls(trace: &SpectrumTrace, p: &DispersiveParams) -> Result<Vec<PullGroup>> {
    let shifts = p.pulls();
    let (lo, hi) = (trace.grid.lo(), trace.grid.hi());
    for &s in &shifts {
        if s < lo || s > hi {
            return Err(Error::Coverage { shift: s, lo, hi });
        }
    }
    let mut order: Vec<LogicState> = LogicState::ALL.to_vec();
    order.sort_by(|a, b| shifts[a.index()].total_cmp(&shifts[b.index()]));
    let merge = MERGE_FRACTION * p.kappa;
    let mut groups: Vec<PullGroup> = Vec::new();
    for s in order {
        let shift = shifts[s.index()];
        match groups.last_mut() {
            Some(g) if shift - shifts[g.states.last().unwrap().index()] < merge => {
                g.states.push(s);
                g.shift = g.states.iter().map(|x| shifts[x.index()]).sum::<f64>() / g.states.len() as f64;
            }
            _ => groups.push(PullGroup {
                states: vec![s],
                shift,
            }),
        }
    }
    // report in logic-state order
    groups.sort_by_key(|g| g.states.iter().min().copied());
    for g in &mut groups {
        g.states.sort();
    }
    Ok(groups)
}

fn peak_near(trace: &SpectrumTrace, shift: f64, half_window: f64) -> bool {
    let g = trace.grid.points();
    let v = &trace.values;
    (1..v.len().saturating_sub(1))
        .filter(|&j| (g[j] - shift).abs() <= half_window)
        .any(|j| v[j] >= v[j - 1] && v[j] >= v[j + 1])
}

fn naive_from_groups(
    trace: &SpectrumTrace,
    p: &DispersiveParams,
    groups: Vec<PullGroup>,
) -> Result<PeakTable> {
    let norm = normalize(trace)?;
    let floor = norm.min_value();
    let mut rows: Vec<PeakRow> = groups
        .into_iter()
        .map(|g| {
            let found = peak_near(&norm, g.shift, 0.5 * p.kappa);
            let height = if found { norm.value_near(g.shift) - floor } else { 0.0 };
            PeakRow {
                states: g.states,
                shift: g.shift,
                height,
                probability: 0.0,
                peak_found: found,
            }
        })
        .collect();
    let total: f64 = rows.iter().map(|r| r.height).sum();
    if !(total > 0.0) {
        return Err(Error::ZeroTrace);
    }
    for r in &mut rows {
        r.probability = r.height / total;
    }
    let notes = rows
        .iter()
        .filter(|r| r.is_merged())
        .map(|r| format!("pulls of {} coincide; read as one peak", r.label()))
        .collect();
    Ok(PeakTable {
        rows,
        method: ExtractionMethod::NaiveHeight,
        floor: Some(floor),
        condition_number: None,
        clamp_residual: None,
        notes,
    })
}

/// Peak-height reading at the expected pulls.
pub fn extract_probs_naive(trace: &SpectrumTrace, p: &DispersiveParams) -> Result<PeakTable> {
    let groups = group_pulls(trace, p)?;
    naive_from_groups(trace, p, groups)
}

fn condition_number(k: &Matrix4<f64>) -> f64 {
    let sv = k.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Deconvolves the four readings through the Lorentzian overlap kernel.
/// Falls back to the naive reader when peaks are merged or the kernel is
/// ill-conditioned.
pub fn extract_probs_kernel(trace: &SpectrumTrace, p: &DispersiveParams) -> Result<PeakTable> {
    let groups = group_pulls(trace, p)?;
    let fallback = |groups, why: String| -> Result<PeakTable> {
        let mut t = naive_from_groups(trace, p, groups)?;
        t.notes.push(format!("kernel deconvolution skipped: {why}; naive reading used"));
        Ok(t)
    };
    if groups.len() < 4 {
        return fallback(groups, "merged peaks".into());
    }
    let norm = normalize(trace)?;
    let shifts = p.pulls();
    let grid = norm.grid.points();
    let read_at: [usize; 4] = std::array::from_fn(|i| norm.grid.nearest_index(shifts[i]));
    let kernel = Matrix4::from_fn(|i, j| p.line(grid[read_at[i]], shifts[j]));
    let cond = condition_number(&kernel);
    if !(cond < MAX_KERNEL_CONDITION) {
        return fallback(groups, format!("kernel condition number {cond:e}"));
    }
    let heights = Vector4::from_fn(|i, _| norm.values[read_at[i]]);
    let Some(raw) = kernel.lu().solve(&heights) else {
        return fallback(groups, "singular kernel".into());
    };
    let abs_sum: f64 = raw.iter().map(|x| x.abs()).sum();
    let negative: f64 = raw.iter().filter(|x| **x < 0.0).map(|x| -x).sum();
    let clamped = raw.map(|x| x.max(0.0));
    let total = clamped.sum();
    if !(total > 0.0) {
        return Err(Error::ZeroTrace);
    }
    let rows = LogicState::ALL
        .iter()
        .map(|&s| PeakRow {
            states: vec![s],
            shift: shifts[s.index()],
            height: heights[s.index()],
            probability: clamped[s.index()] / total,
            peak_found: peak_near(&norm, shifts[s.index()], 0.5 * p.kappa),
        })
        .collect();
    Ok(PeakTable {
        rows,
        method: ExtractionMethod::KernelDeconvolution,
        floor: None,
        condition_number: Some(cond),
        clamp_residual: Some(if abs_sum > 0.0 { negative / abs_sum } else { 0.0 }),
        notes: Vec::new(),
    })
}

/// Probabilities of the generating state, with the trace read at each pull.
pub fn extract_probs_exact(trace: &SpectrumTrace, p: &DispersiveParams) -> Result<PeakTable> {
    let source = trace
        .source
        .ok_or_else(|| Error::InvalidArgument("trace carries no source state".into()))?;
    let norm = normalize(trace)?;
    let shifts = p.pulls();
    let rows = LogicState::ALL
        .iter()
        .map(|&s| PeakRow {
            states: vec![s],
            shift: shifts[s.index()],
            height: norm.value_near(shifts[s.index()]),
            probability: source.probs[s.index()],
            peak_found: peak_near(&norm, shifts[s.index()], 0.5 * p.kappa),
        })
        .collect();
    Ok(PeakTable {
        rows,
        method: ExtractionMethod::Exact,
        floor: None,
        condition_number: None,
        clamp_residual: None,
        notes: Vec::new(),
    })
}

pub fn extract_probs(trace: &SpectrumTrace, p: &DispersiveParams, method: ExtractionMethod) -> Result<PeakTable> {
    match method {
        ExtractionMethod::NaiveHeight => extract_probs_naive(trace, p),
        ExtractionMethod::KernelDeconvolution => extract_probs_kernel(trace, p),
        ExtractionMethod::Exact => extract_probs_exact(trace, p),
    }
}

/// Correlation of the two qubits from a spectrum.
///
/// A merged peak is fine as long as its states share parity (for example
/// |01⟩ and |10⟩ when Γ1 = Γ2); otherwise P_same and P_diff cannot be
/// separated.
pub fn correlation_from_trace(
    trace: &SpectrumTrace,
    p: &DispersiveParams,
    method: ExtractionMethod,
) -> Result<CorrelationEstimate> {
    let table = extract_probs(trace, p, method)?;
    for row in table.rows.iter().filter(|r| r.is_merged()) {
        let same = row.states.iter().filter(|s| s.is_same()).count();
        if same != 0 && same != row.states.len() {
            return Err(Error::AmbiguousMerge(row.label()));
        }
    }
    Ok(CorrelationEstimate::from_probabilities(table.probabilities(), method))
}

/// Diagnostic: positions (rad/ns) and normalized heights of all local maxima.
pub fn local_maxima(trace: &SpectrumTrace) -> Result<Vec<(f64, f64)>> {
    let norm = normalize(trace)?;
    Ok(norm
        .local_maxima()
        .into_iter()
        .map(|i| (norm.grid.points()[i], norm.values[i]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{encode, prepare_bell, BellLabel};
    use crate::quantum::TwoQubitState;
    use crate::spectrum::{lorentzian_from_probabilities, lorentzian_spectrum, DetuningGrid};
    use crate::units::mhz;
    use std::f64::consts::PI;

    fn reference_trace(probs: [f64; 4]) -> SpectrumTrace {
        lorentzian_from_probabilities(&probs, &DispersiveParams::reference(), &DetuningGrid::standard())
    }

    #[test]
    fn naive_reads_phi_minus() {
        let p = DispersiveParams::reference();
        let t = lorentzian_spectrum(&BellLabel::PhiMinus.state(), &p, &DetuningGrid::standard());
        let probs = extract_probs_naive(&t, &p).unwrap().probabilities();
        assert!((probs[0] - 0.5).abs() < 0.01 && (probs[3] - 0.5).abs() < 0.01);
        assert!(probs[1] < 0.01 && probs[2] < 0.01);
    }

    #[test]
    fn naive_single_peak() {
        let table = extract_probs_naive(&reference_trace([1.0, 0.0, 0.0, 0.0]), &DispersiveParams::reference()).unwrap();
        assert!(table.probabilities()[0] >= 0.997);
        let sum: f64 = table.rows.iter().map(|r| r.probability).sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn naive_uniform_heights_are_mirror_symmetric() {
        let table = extract_probs_naive(&reference_trace([0.25; 4]), &DispersiveParams::reference()).unwrap();
        let h: Vec<f64> = table.rows.iter().map(|r| r.height).collect();
        assert!((h[0] - h[3]).abs() < 1e-6);
        assert!((h[1] - h[2]).abs() < 1e-6);
        // all four equal up to the small asymmetric tail overlap
        assert!((h[0] - h[1]).abs() < 1e-3 * h[0]);
    }

    #[test]
    fn kernel_recovers_single_column_exactly() {
        let table = extract_probs_kernel(&reference_trace([1.0, 0.0, 0.0, 0.0]), &DispersiveParams::reference()).unwrap();
        let probs = table.probabilities();
        assert!((probs[0] - 1.0).abs() < 1e-9);
        assert!(probs[1..].iter().all(|x| x.abs() < 1e-9));
        assert!(table.condition_number.unwrap() < 10.0);
    }

    #[test]
    fn kernel_removes_overlap_bias() {
        let p = DispersiveParams::reference();
        let s = encode(&prepare_bell(), PI / 2.0, 3.0 * PI / 4.0);
        let t = lorentzian_spectrum(&s, &p, &DetuningGrid::standard());
        let naive = correlation_from_trace(&t, &p, ExtractionMethod::NaiveHeight).unwrap();
        let kernel = correlation_from_trace(&t, &p, ExtractionMethod::KernelDeconvolution).unwrap();
        assert!((naive.value + 0.704).abs() < 0.005, "{}", naive.value);
        assert!((kernel.value + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3);
    }

    #[test]
    fn narrow_lines_make_methods_agree() {
        let p = DispersiveParams::reference().with_kappa(mhz(0.1)).unwrap();
        let s = encode(&prepare_bell(), 0.3, 2.1);
        let t = lorentzian_spectrum(&s, &p, &DetuningGrid::standard());
        let a = correlation_from_trace(&t, &p, ExtractionMethod::NaiveHeight).unwrap();
        let b = correlation_from_trace(&t, &p, ExtractionMethod::KernelDeconvolution).unwrap();
        assert!((a.value - b.value).abs() < 1e-4);
    }

    #[test]
    fn correlation_signs() {
        let p = DispersiveParams::reference();
        let grid = DetuningGrid::standard();
        let phi = lorentzian_spectrum(&BellLabel::PhiMinus.state(), &p, &grid);
        let psi = lorentzian_spectrum(&BellLabel::PsiPlus.state(), &p, &grid);
        let m = ExtractionMethod::NaiveHeight;
        assert!((correlation_from_trace(&phi, &p, m).unwrap().value - 1.0).abs() < 0.01);
        assert!((correlation_from_trace(&psi, &p, m).unwrap().value + 1.0).abs() < 0.01);
    }

    #[test]
    fn merged_device_gives_same_correlation() {
        let grid = DetuningGrid::uniform(mhz(-40.0), mhz(40.0), 3201).unwrap();
        let separated = DispersiveParams::reference();
        let merged = DispersiveParams::new(mhz(13.0), mhz(13.0), mhz(1.0), 0.0).unwrap();
        let s = encode(&prepare_bell(), 0.4, 1.9);
        for method in [ExtractionMethod::NaiveHeight, ExtractionMethod::KernelDeconvolution] {
            let t_sep = lorentzian_spectrum(&s, &separated, &grid);
            let t_mer = lorentzian_spectrum(&s, &merged, &grid);
            let table = extract_probs(&t_mer, &merged, method).unwrap();
            assert!(table.has_merged_peaks());
            assert_eq!(table.rows.len(), 3);
            let e_sep = correlation_from_trace(&t_sep, &separated, method).unwrap().value;
            let e_mer = correlation_from_trace(&t_mer, &merged, method).unwrap().value;
            assert!((e_sep - e_mer).abs() < 0.01, "{method}: {e_sep} vs {e_mer}");
        }
    }

    #[test]
    fn mixed_parity_merge_is_ambiguous() {
        let p = DispersiveParams::new(mhz(10.0), 0.0, mhz(1.0), 0.0).unwrap();
        let t = lorentzian_spectrum(&BellLabel::PhiMinus.state(), &p, &DetuningGrid::standard());
        assert!(matches!(
            correlation_from_trace(&t, &p, ExtractionMethod::NaiveHeight),
            Err(Error::AmbiguousMerge(_))
        ));
    }

    #[test]
    fn uncovered_pull_is_an_error() {
        let p = DispersiveParams::reference();
        let grid = DetuningGrid::uniform(mhz(-10.0), mhz(10.0), 401).unwrap();
        let t = lorentzian_spectrum(&TwoQubitState::basis(LogicState::S00), &p, &grid);
        assert!(matches!(extract_probs_naive(&t, &p), Err(Error::Coverage { .. })));
        assert!(matches!(extract_probs_kernel(&t, &p), Err(Error::Coverage { .. })));
    }

    #[test]
    fn peak_table_csv() {
        let table = extract_probs_naive(&reference_trace([0.25; 4]), &DispersiveParams::reference()).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().nth(1).unwrap().starts_with("00,17"));
    }

    #[test]
    fn method_names_parse() {
        assert_eq!("naive".parse::<ExtractionMethod>().unwrap(), ExtractionMethod::NaiveHeight);
        assert_eq!(
            "kernel-deconvolution".parse::<ExtractionMethod>().unwrap(),
            ExtractionMethod::KernelDeconvolution
        );
        assert!("fit".parse::<ExtractionMethod>().is_err());
    }
}
