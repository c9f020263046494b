//! Steady-state transmission spectra of the driven resonator.
//!
//! In the frame rotating at the drive frequency the dispersive Hamiltonian is
//!
//! ```text
//! H = (−Δr + Γ1σz1 + Γ2σz2) a†a + ω̃1/2 σz1 + ω̃2/2 σz2 + ε(a† + a)
//! ```
//!
//! so each computational basis state |kl⟩ pulls the resonator by
//! s_kl = z1·Γ1 + z2·Γ2, where (z1, z2) are its σz eigenvalues (σz|0⟩ = +|0⟩).
//! This is the single place where the σz sign convention meets the
//! spectrum: |00⟩ sits at +Γ1+Γ2 and |11⟩ at −Γ1−Γ2.
//!
//! Three engines produce the same line shape:
//!
//! * [`closed_form_spectrum`]: the four-pole rational expression −2(AC+BD)/κ(A²+B²)
//! * [`lorentzian_spectrum`]: Σ P_kl / ((Δr − s_kl)² + κ²/4)
//! * [`lindblad_spectrum`]: ⟨a†a⟩/2ε from the damped, driven master equation
//!   in a truncated Fock space

mod io;
mod lindblad;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ConfigFile, DeviceConfig};
use crate::error::{Error, Result};
use crate::quantum::{Expectations, LogicState, TwoQubitState};
use crate::units::mhz;

pub use io::{read_trace_csv, write_trace_csv, TRACE_HEADER};
pub use lindblad::{
    cavity_steady_state, lindblad_spectrum, CavitySteadyState, LindbladSweep, DEFAULT_N_MAX,
    MAX_TOP_OCCUPATION,
};

/// Dispersive-regime parameters of the spectroscopy (all rad/ns).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersiveParams {
    /// Γ1 = g1²/Δ1
    pub gamma1: f64,
    /// Γ2 = g2²/Δ2
    pub gamma2: f64,
    /// Resonator photon leakage rate.
    pub kappa: f64,
    /// Probe drive amplitude (only the Lindblad engine depends on it).
    pub epsilon: f64,
}

/// Default probe amplitude for the master-equation engine: 2π × 0.05 MHz.
pub fn default_probe_epsilon() -> f64 {
    mhz(0.05)
}

impl DispersiveParams {
    pub fn new(gamma1: f64, gamma2: f64, kappa: f64, epsilon: f64) -> Result<Self> {
        if !(gamma1.is_finite() && gamma2.is_finite()) {
            return Err(Error::NonFinite("dispersive shifts"));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::Config(format!("kappa must be positive, got {kappa}")));
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::Config(format!("probe epsilon must be non-negative, got {epsilon}")));
        }
        Ok(Self {
            gamma1,
            gamma2,
            kappa,
            epsilon,
        })
    }

    /// (Γ1, Γ2, κ) = 2π × (13, 4, 1) MHz with the default probe amplitude.
    pub fn reference() -> Self {
        Self::new(mhz(13.0), mhz(4.0), mhz(1.0), default_probe_epsilon()).unwrap()
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.gamma1, self.gamma2, kappa, self.epsilon)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.gamma1, self.gamma2, self.kappa, epsilon)
    }

    pub fn from_device(device: &DeviceConfig, probe_epsilon: f64) -> Result<Self> {
        let [g1, g2] = device.dispersive_shifts();
        Self::new(g1, g2, device.kappa, probe_epsilon)
    }

    /// Uses `gamma_1`/`gamma_2` when present, otherwise derives the pulls
    /// from the device couplings.
    pub fn from_config(cfg: &ConfigFile) -> Result<Self> {
        let epsilon = cfg.frequency_or("probe_epsilon", default_probe_epsilon())?;
        let kappa = cfg.frequency("kappa")?;
        if cfg.contains("gamma_1") || cfg.contains("gamma_2") {
            Self::new(cfg.frequency("gamma_1")?, cfg.frequency("gamma_2")?, kappa, epsilon)
        } else {
            Self::from_device(&DeviceConfig::from_config(cfg)?, epsilon)
        }
    }

    /// Resonator pull for each logic state, indexed by [`LogicState::index`].
    pub fn pulls(&self) -> [f64; 4] {
        pulls(self)
    }

    /// Smallest distance between two distinct pulls.
    pub fn min_pull_separation(&self) -> f64 {
        let s = self.pulls();
        let mut best = f64::INFINITY;
        for i in 0..4 {
            for j in i + 1..4 {
                best = best.min((s[i] - s[j]).abs());
            }
        }
        best
    }

    /// Lorentzian line of a single pulled state: 1/((Δr − shift)² + κ²/4).
    pub fn line(&self, delta_r: f64, shift: f64) -> f64 {
        let x = delta_r - shift;
        1.0 / (x * x + 0.25 * self.kappa * self.kappa)
    }
}

/// |00⟩ → Γ1+Γ2, |01⟩ → Γ1−Γ2, |10⟩ → −Γ1+Γ2, |11⟩ → −Γ1−Γ2.
pub fn pulls(p: &DispersiveParams) -> [f64; 4] {
    LogicState::ALL.map(|s| {
        let (z1, z2) = s.z_eigenvalues();
        z1 * p.gamma1 + z2 * p.gamma2
    })
}

/// Strictly increasing sweep of drive detunings Δr = ω_d − ω_r (rad/ns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetuningGrid {
    points: Vec<f64>,
}

impl DetuningGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("empty detuning grid".into()));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("detuning grid"));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("detuning grid must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    /// `n` evenly spaced points from `lo` to `hi` inclusive.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::InvalidArgument(format!(
                "grid needs hi > lo and at least 2 points (got [{lo}, {hi}], n = {n})"
            )));
        }
        let span = hi - lo;
        let last = (n - 1) as f64;
        Self::new((0..n).map(|i| lo + span * (i as f64 / last)).collect())
    }

    /// Δr/2π ∈ [−25, 25] MHz with 2001 points (step κ/40 for κ = 2π × 1 MHz).
    pub fn standard() -> Self {
        Self::uniform(mhz(-25.0), mhz(25.0), 2001).unwrap()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        *self.points.last().unwrap()
    }

    /// Largest spacing between neighbouring points.
    pub fn max_step(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Index of the grid point closest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        match self.points.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i == self.points.len() => i - 1,
            Err(i) => {
                if x - self.points[i - 1] <= self.points[i] - x {
                    i - 1
                } else {
                    i
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    ClosedForm,
    Lorentzian,
    Lindblad,
    Imported,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::Lorentzian => "lorentzian",
            Provenance::Lindblad => "lindblad",
            Provenance::Imported => "imported",
        }
    }
}

/// Sampled spectrum over a detuning grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTrace {
    pub grid: DetuningGrid,
    pub values: Vec<f64>,
    pub provenance: Provenance,
    /// Statistics of the generating state, when known.
    pub source: Option<Expectations>,
}

impl SpectrumTrace {
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Value at the grid point nearest to `delta_r`.
    pub fn value_near(&self, delta_r: f64) -> f64 {
        self.values[self.grid.nearest_index(delta_r)]
    }

    /// Grid positions of strict-or-plateau interior local maxima.
    pub fn local_maxima(&self) -> Vec<usize> {
        let v = &self.values;
        (1..v.len().saturating_sub(1))
            .filter(|&i| v[i] >= v[i - 1] && v[i] > v[i + 1])
            .collect()
    }

    /// Largest pointwise difference between the two normalized traces.
    pub fn max_normalized_deviation(&self, other: &SpectrumTrace) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidArgument("traces are on different grids".into()));
        }
        let a = normalize(self)?;
        let b = normalize(other)?;
        Ok(a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }
}

/// Which first term to use in the closed-form denominator polynomial A.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ATerm {
    /// (Γ1² − Γ2²)², the constant term of the four-pole product.
    #[default]
    Squared,
    /// (Γ1² − Γ2²), kept for comparison; dimensionally inconsistent.
    Unsquared,
}

fn closed_form_point(e: &Expectations, p: &DispersiveParams, d: f64, a_term: ATerm) -> Result<f64> {
    let (g1, g2, k) = (p.gamma1, p.gamma2, p.kappa);
    let (g1s, g2s) = (g1 * g1, g2 * g2);
    let q = 0.25 * k * k - d * d;
    let first = match a_term {
        ATerm::Squared => (g1s - g2s).powi(2),
        ATerm::Unsquared => g1s - g2s,
    };
    let a = first + 2.0 * q * (g1s + g2s) + q * q - k * k * d * d;
    let b = -2.0 * k * d * (g1s + g2s + q);
    let c = k * e.zz * g1 * g2 + k * d * (e.z1 * g1 + e.z2 * g2)
        + 0.5 * k * (3.0 * d * d - 0.25 * k * k - g1s - g2s);
    let dd = -2.0 * e.zz * d * g1 * g2
        + e.z1 * g1 * (g1s - g2s + q)
        + e.z2 * g2 * (g2s - g1s + q)
        + d * (g1s + g2s + 0.75 * k * k - d * d);
    let den = a * a + b * b;
    if !(den.is_finite() && den > 0.0) {
        return Err(Error::SingularPoint { delta_r: d });
    }
    Ok(-2.0 * (a * c + b * dd) / (k * den))
}

/// Closed-form steady-state spectrum with the squared A term.
pub fn closed_form_spectrum(
    s: &TwoQubitState,
    p: &DispersiveParams,
    grid: &DetuningGrid,
) -> Result<SpectrumTrace> {
    closed_form_spectrum_with(s, p, grid, ATerm::Squared)
}

pub fn closed_form_spectrum_with(
    s: &TwoQubitState,
    p: &DispersiveParams,
    grid: &DetuningGrid,
    a_term: ATerm,
) -> Result<SpectrumTrace> {
    closed_form_from_expectations(&s.expectations(), p, grid, a_term)
}

/// Closed form driven directly by ⟨σz1⟩, ⟨σz2⟩, ⟨σz1σz2⟩.
pub fn closed_form_from_expectations(
    e: &Expectations,
    p: &DispersiveParams,
    grid: &DetuningGrid,
    a_term: ATerm,
) -> Result<SpectrumTrace> {
    let values = grid
        .points()
        .par_iter()
        .map(|&d| closed_form_point(e, p, d, a_term))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumTrace {
        grid: grid.clone(),
        values,
        provenance: Provenance::ClosedForm,
        source: Some(*e),
    })
}

/// Mixture of Lorentzians of half-width κ/2 centred on the pulls and
/// weighted by the basis-state probabilities.
pub fn lorentzian_spectrum(s: &TwoQubitState, p: &DispersiveParams, grid: &DetuningGrid) -> SpectrumTrace {
    lorentzian_from_probabilities(&s.probabilities(), p, grid)
}

pub fn lorentzian_from_probabilities(
    probs: &[f64; 4],
    p: &DispersiveParams,
    grid: &DetuningGrid,
) -> SpectrumTrace {
    let shifts = p.pulls();
    let values = grid
        .points()
        .par_iter()
        .map(|&d| (0..4).map(|k| probs[k] * p.line(d, shifts[k])).sum())
        .collect();
    SpectrumTrace {
        grid: grid.clone(),
        values,
        provenance: Provenance::Lorentzian,
        source: Some(Expectations::from_probabilities(*probs)),
    }
}

/// Rescales the trace so its maximum is 1.
pub fn normalize(trace: &SpectrumTrace) -> Result<SpectrumTrace> {
    if trace.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("spectrum values"));
    }
    let max = trace.max_value();
    if !(max > 0.0) {
        return Err(Error::ZeroTrace);
    }
    Ok(SpectrumTrace {
        values: trace.values.iter().map(|v| v / max).collect(),
        ..trace.clone()
    })
}

/// Spectrum engine selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Engine {
    ClosedForm,
    Lorentzian,
    Lindblad,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::ClosedForm, Engine::Lorentzian, Engine::Lindblad];

    pub fn name(self) -> &'static str {
        match self {
            Engine::ClosedForm => "closed-form",
            Engine::Lorentzian => "lorentzian",
            Engine::Lindblad => "lindblad",
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown engine `{s}`")))
    }
}

/// A configured engine on a fixed grid. The master-equation engine solves
/// its cavity sectors once, at construction.
#[derive(Debug, Clone)]
pub struct Spectrometer {
    engine: Engine,
    params: DispersiveParams,
    grid: DetuningGrid,
    sweep: Option<LindbladSweep>,
}

impl Spectrometer {
    pub fn new(engine: Engine, params: &DispersiveParams, grid: &DetuningGrid, n_max: usize) -> Result<Self> {
        let sweep = match engine {
            Engine::Lindblad => Some(LindbladSweep::new(params, grid, n_max)?),
            _ => None,
        };
        Ok(Self {
            engine,
            params: *params,
            grid: grid.clone(),
            sweep,
        })
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn params(&self) -> &DispersiveParams {
        &self.params
    }

    pub fn grid(&self) -> &DetuningGrid {
        &self.grid
    }

    pub fn trace(&self, s: &TwoQubitState) -> Result<SpectrumTrace> {
        match (&self.sweep, self.engine) {
            (Some(sweep), _) => Ok(sweep.trace(s)),
            (None, Engine::ClosedForm) => closed_form_spectrum(s, &self.params, &self.grid),
            (None, _) => Ok(lorentzian_spectrum(s, &self.params, &self.grid)),
        }
    }
}
