//! CHSH test: prepare → encode → spectrum → extract → E, four times.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{analytic_correlation, encode, prepare_bell, AngleSet};
use crate::error::{Error, Result};
use crate::readout::{correlation_from_trace, CorrelationEstimate, ExtractionMethod};
use crate::spectrum::{DetuningGrid, DispersiveParams, Engine, Spectrometer, DEFAULT_N_MAX};

/// Classical bound on the CHSH function.
pub const LHV_BOUND: f64 = 2.0;
/// 2√2
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;

/// |E0 + E1 + E2 − E3| for correlations in [`AngleSet::pairs`] order.
pub fn chsh_function(e: [f64; 4]) -> f64 {
    (e[0] + e[1] + e[2] - e[3]).abs()
}

pub fn chsh_analytic(a: &AngleSet) -> f64 {
    chsh_function(a.pairs().map(|(t1, t2)| analytic_correlation(t1, t2)))
}

/// Spectrum engine plus extraction method; every correlation starts from a
/// freshly prepared Bell state.
#[derive(Debug, Clone)]
pub struct Pipeline {
    spectrometer: Spectrometer,
    method: ExtractionMethod,
}

impl Pipeline {
    pub fn new(
        engine: Engine,
        params: &DispersiveParams,
        grid: &DetuningGrid,
        n_max: usize,
        method: ExtractionMethod,
    ) -> Result<Self> {
        Ok(Self {
            spectrometer: Spectrometer::new(engine, params, grid, n_max)?,
            method,
        })
    }

    /// Lorentzian engine on the standard ±25 MHz grid.
    pub fn standard(params: &DispersiveParams, method: ExtractionMethod) -> Result<Self> {
        Self::new(Engine::Lorentzian, params, &DetuningGrid::standard(), DEFAULT_N_MAX, method)
    }

    pub fn engine(&self) -> Engine {
        self.spectrometer.engine()
    }

    pub fn method(&self) -> ExtractionMethod {
        self.method
    }

    pub fn params(&self) -> &DispersiveParams {
        self.spectrometer.params()
    }

    pub fn correlation(&self, theta1: f64, theta2: f64) -> Result<CorrelationEstimate> {
        let state = encode(&prepare_bell(), theta1, theta2);
        let trace = self.spectrometer.trace(&state)?;
        correlation_from_trace(&trace, self.spectrometer.params(), self.method)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshReport {
    pub angles: AngleSet,
    /// In [`AngleSet::pairs`] order.
    pub estimates: [CorrelationEstimate; 4],
    pub f: f64,
    pub analytic_f: f64,
    pub violated: bool,
    pub method: ExtractionMethod,
    /// `None` when the correlations did not come from a spectrum.
    pub engine: Option<Engine>,
}

impl ChshReport {
    pub fn from_estimates(
        angles: AngleSet,
        estimates: [CorrelationEstimate; 4],
        method: ExtractionMethod,
        engine: Option<Engine>,
    ) -> Self {
        let f = chsh_function(estimates.map(|e| e.value));
        Self {
            angles,
            estimates,
            f,
            analytic_f: chsh_analytic(&angles),
            violated: f > LHV_BOUND,
            method,
            engine,
        }
    }

    pub fn values(&self) -> [f64; 4] {
        self.estimates.map(|e| e.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }
}

const PAIR_LABELS: [&str; 4] = ["(θ1, θ2)", "(θ1', θ2)", "(θ1, θ2')", "(θ1', θ2')"];

impl fmt::Display for ChshReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let engine = self.engine.map_or("none", Engine::name);
        writeln!(f, "CHSH report: method {}, engine {}", self.method, engine)?;
        let [t1, t2, t1p, t2p] = self.angles.as_array();
        writeln!(f, "angles (rad): θ1 = {t1:.6}, θ2 = {t2:.6}, θ1' = {t1p:.6}, θ2' = {t2p:.6}")?;
        writeln!(
            f,
            "{:<12} {:>10} {:>10} {:>8} {:>8} {:>8} {:>8}",
            "pair", "E", "cos", "P00", "P01", "P10", "P11"
        )?;
        for ((label, est), (a, b)) in PAIR_LABELS.iter().zip(&self.estimates).zip(self.angles.pairs()) {
            let p = est.probs;
            writeln!(
                f,
                "{:<12} {:>10.6} {:>10.6} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
                label,
                est.value,
                analytic_correlation(a, b),
                p[0],
                p[1],
                p[2],
                p[3]
            )?;
        }
        writeln!(f, "f = {:.6}  (analytic {:.6})", self.f, self.analytic_f)?;
        write!(
            f,
            "verdict: {}",
            if self.violated { "violated (f > 2)" } else { "not violated (f <= 2)" }
        )
    }
}

pub fn chsh_simulated(angles: &AngleSet, pipeline: &Pipeline) -> Result<ChshReport> {
    let estimates: Vec<CorrelationEstimate> = angles
        .pairs()
        .par_iter()
        .map(|&(a, b)| pipeline.correlation(a, b))
        .collect::<Result<_>>()?;
    Ok(ChshReport::from_estimates(
        *angles,
        estimates.try_into().expect("four pairs"),
        pipeline.method(),
        Some(pipeline.engine()),
    ))
}

/// Correlations straight from the encoded state's probabilities.
pub fn chsh_exact(angles: &AngleSet) -> ChshReport {
    let estimates = angles.pairs().map(|(a, b)| {
        let probs = encode(&prepare_bell(), a, b).probabilities();
        CorrelationEstimate::from_probabilities(probs, ExtractionMethod::Exact)
    });
    ChshReport::from_estimates(*angles, estimates, ExtractionMethod::Exact, None)
}

/// Where scan correlations come from.
#[derive(Debug, Clone, Copy)]
pub enum ScanSource<'a> {
    Analytic,
    Simulated(&'a Pipeline),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Angles per axis: 2πk/n.
    pub resolution: usize,
    pub best: ChshReport,
    /// (θ1, θ2, θ1', θ2', f) for every scanned combination.
    pub landscape: Vec<([f64; 4], f64)>,
}

impl ScanResult {
    pub fn write_landscape_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "theta1,theta2,theta1p,theta2p,f")?;
        for ([a, b, c, d], f) in &self.landscape {
            writeln!(out, "{a},{b},{c},{d},{f}")?;
        }
        Ok(())
    }
}

/// Smallest per-axis resolution accepted by [`chsh_scan`].
pub const MIN_SCAN_RESOLUTION: usize = 16;

/// Exhaustive search of f over θ_k = 2πk/n on all four angles. With
/// `restricted`, only θ1' = θ1 and θ2' = θ2 are visited.
///
/// E depends on one (θ1, θ2) pair at a time, so the n² correlations are
/// computed once and combined.
pub fn chsh_scan(resolution: usize, source: ScanSource<'_>, restricted: bool) -> Result<ScanResult> {
    if resolution < MIN_SCAN_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "scan resolution must be at least {MIN_SCAN_RESOLUTION}, got {resolution}"
        )));
    }
    let n = resolution;
    let theta: Vec<f64> = (0..n).map(|k| std::f64::consts::TAU * k as f64 / n as f64).collect();
    let table: Vec<CorrelationEstimate> = (0..n * n)
        .into_par_iter()
        .map(|ij| {
            let (a, b) = (theta[ij / n], theta[ij % n]);
            match source {
                ScanSource::Analytic => {
                    let probs = encode(&prepare_bell(), a, b).probabilities();
                    Ok(CorrelationEstimate::from_probabilities(probs, ExtractionMethod::Exact))
                }
                ScanSource::Simulated(p) => p.correlation(a, b),
            }
        })
        .collect::<Result<_>>()?;
    let e = |i: usize, j: usize| table[i * n + j];

    let mut landscape = Vec::with_capacity(if restricted { n * n } else { n.pow(4) });
    let mut best: Option<(usize, usize, usize, usize, f64)> = None;
    for i in 0..n {
        for j in 0..n {
            let (ks, ls) = if restricted { (i..i + 1, j..j + 1) } else { (0..n, 0..n) };
            for k in ks {
                for l in ls.clone() {
                    let f = chsh_function([e(i, j).value, e(k, j).value, e(i, l).value, e(k, l).value]);
                    landscape.push(([theta[i], theta[j], theta[k], theta[l]], f));
                    if best.is_none_or(|b| f > b.4) {
                        best = Some((i, j, k, l, f));
                    }
                }
            }
        }
    }
    let (i, j, k, l, _) = best.expect("non-empty scan");
    let angles = AngleSet::new(theta[i], theta[j], theta[k], theta[l])?;
    let (method, engine) = match source {
        ScanSource::Analytic => (ExtractionMethod::Exact, None),
        ScanSource::Simulated(p) => (p.method(), Some(p.engine())),
    };
    let best = ChshReport::from_estimates(angles, [e(i, j), e(k, j), e(i, l), e(k, l)], method, engine);
    Ok(ScanResult {
        resolution,
        best,
        landscape,
    })
}
