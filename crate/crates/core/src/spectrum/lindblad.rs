//! Master-equation oracle for the transmission spectrum.
//!
//! The generator acts on ρ over (two qubits) ⊗ (Fock space truncated at
//! `n_max` photons):
//!
//! ```text
//! dρ/dt = −i[H, ρ] + κ(aρa† − ½{a†a, ρ}),
//! H = Σ_kl |kl⟩⟨kl| ⊗ (s_kl − Δr) a†a + ε(a + a†)
//! ```
//!
//! H is block diagonal in the qubit basis (every σz commutes with it) and
//! the qubits do not decay, so the generator maps each block |kl⟩⟨k'l'| ⊗ X
//! onto itself. The diagonal blocks conserve their trace P_kl, the
//! off-diagonal blocks carry no photon number, and the stationary state
//! reached from |ψ⟩ ⊗ |0⟩ is
//!
//! ```text
//! ρ_ss = Σ_kl P_kl |kl⟩⟨kl| ⊗ ρ_kl,   ρ_kl = null vector of L_kl with Tr = 1
//! ```
//!
//! Each ρ_kl is found by a dense LU solve of the (n_max+1)²-dimensional
//! cavity generator with one row replaced by the trace condition. The qubit
//! energies ω̃_j σz_j / 2 cancel inside diagonal blocks and are omitted.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::{DetuningGrid, DispersiveParams, Provenance, SpectrumTrace};
use crate::error::{Error, Result};
use crate::quantum::TwoQubitState;

pub const DEFAULT_N_MAX: usize = 8;
/// Largest tolerated population of the highest retained Fock level.
pub const MAX_TOP_OCCUPATION: f64 = 1e-6;
const MAX_RESIDUAL: f64 = 1e-10;

/// Stationary state of one pulled cavity sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavitySteadyState {
    /// ⟨a†a⟩
    pub photon_number: f64,
    /// ρ[n_max, n_max]
    pub top_occupation: f64,
    /// max |L(ρ)| of the returned solution
    pub residual: f64,
}

fn idx(i: usize, j: usize, dim: usize) -> usize {
    i + dim * j
}

/// Applies the cavity generator with frequency `omega` (rotating frame) to
/// the column-stacked density matrix `rho`.
fn apply_generator(rho: &DVector<Complex64>, omega: f64, kappa: f64, epsilon: f64, dim: usize) -> DVector<Complex64> {
    let mut out = DVector::zeros(dim * dim);
    let im = Complex64::new(0.0, 1.0);
    let sq = |n: usize| (n as f64).sqrt();
    for j in 0..dim {
        for i in 0..dim {
            let mut acc = (-im * omega * (i as f64 - j as f64) - 0.5 * kappa * (i + j) as f64)
                * rho[idx(i, j, dim)];
            if i > 0 {
                acc += -im * epsilon * sq(i) * rho[idx(i - 1, j, dim)];
            }
            if i + 1 < dim {
                acc += -im * epsilon * sq(i + 1) * rho[idx(i + 1, j, dim)];
            }
            if j > 0 {
                acc += im * epsilon * sq(j) * rho[idx(i, j - 1, dim)];
            }
            if j + 1 < dim {
                acc += im * epsilon * sq(j + 1) * rho[idx(i, j + 1, dim)];
            }
            if i + 1 < dim && j + 1 < dim {
                acc += kappa * sq(i + 1) * sq(j + 1) * rho[idx(i + 1, j + 1, dim)];
            }
            out[idx(i, j, dim)] = acc;
        }
    }
    out
}

/// Stationary state of a single driven, damped cavity mode with
/// H = `detuning`·a†a + ε(a + a†) and leakage κ, truncated at `n_max` photons.
///
/// `detuning` is the mode frequency in the drive frame, s_kl − Δr.
pub fn cavity_steady_state(detuning: f64, kappa: f64, epsilon: f64, n_max: usize) -> Result<CavitySteadyState> {
    if n_max < 4 {
        return Err(Error::InvalidArgument(format!("photon cutoff must be at least 4, got {n_max}")));
    }
    if !(kappa > 0.0) || !detuning.is_finite() || !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument("invalid cavity parameters".into()));
    }
    let dim = n_max + 1;
    let n = dim * dim;
    // build the generator column by column from basis matrices
    let mut gen = DMatrix::<Complex64>::zeros(n, n);
    let mut unit = DVector::<Complex64>::zeros(n);
    for col in 0..n {
        unit[col] = Complex64::new(1.0, 0.0);
        gen.set_column(col, &apply_generator(&unit, detuning, kappa, epsilon, dim));
        unit[col] = Complex64::new(0.0, 0.0);
    }
    let mut system = gen.clone();
    let mut rhs = DVector::<Complex64>::zeros(n);
    // trace condition replaces the equation for ρ00
    for col in 0..n {
        system[(0, col)] = Complex64::new(0.0, 0.0);
    }
    for i in 0..dim {
        system[(0, idx(i, i, dim))] = Complex64::new(1.0, 0.0);
    }
    rhs[0] = Complex64::new(1.0, 0.0);

    let rho = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NonConvergence("singular steady-state system".into()))?;
    let residual = (&gen * &rho).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(residual < MAX_RESIDUAL) {
        return Err(Error::NonConvergence(format!("generator residual {residual:e}")));
    }
    let photon_number: f64 = (0..dim).map(|i| i as f64 * rho[idx(i, i, dim)].re).sum();
    let top_occupation = rho[idx(n_max, n_max, dim)].re;
    if top_occupation > MAX_TOP_OCCUPATION || photon_number >= 0.5 * n_max as f64 {
        return Err(Error::Cutoff {
            occupation: top_occupation,
            n_max,
        });
    }
    Ok(CavitySteadyState {
        photon_number,
        top_occupation,
        residual,
    })
}

/// Per-sector stationary photon numbers over a grid, reusable for any
/// two-qubit state with the same parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladSweep {
    params: DispersiveParams,
    grid: DetuningGrid,
    n_max: usize,
    /// ⟨a†a⟩ of each logic-state sector at each grid point.
    sector_photons: Vec<[f64; 4]>,
}

impl LindbladSweep {
    pub fn new(params: &DispersiveParams, grid: &DetuningGrid, n_max: usize) -> Result<Self> {
        if n_max < 4 {
            return Err(Error::InvalidArgument(format!("photon cutoff must be at least 4, got {n_max}")));
        }
        let shifts = params.pulls();
        let sector_photons = if params.epsilon == 0.0 {
            // undriven: every sector relaxes to vacuum
            vec![[0.0; 4]; grid.len()]
        } else {
            // sectors with coinciding detunings share one solve
            let mut unique: Vec<f64> = Vec::new();
            let mut slot: HashMap<u64, usize> = HashMap::new();
            let mut lookup = Vec::with_capacity(grid.len());
            for &d in grid.points() {
                lookup.push(shifts.map(|s| {
                    let w = s - d;
                    *slot.entry(w.to_bits()).or_insert_with(|| {
                        unique.push(w);
                        unique.len() - 1
                    })
                }));
            }
            let solved = unique
                .par_iter()
                .map(|&w| cavity_steady_state(w, params.kappa, params.epsilon, n_max).map(|c| c.photon_number))
                .collect::<Result<Vec<_>>>()?;
            lookup.iter().map(|ix| ix.map(|k| solved[k])).collect()
        };
        Ok(Self {
            params: *params,
            grid: grid.clone(),
            n_max,
            sector_photons,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn sector_photons(&self) -> &[[f64; 4]] {
        &self.sector_photons
    }

    /// S = ⟨a†a⟩_ss / 2ε for the given state; identically zero when ε = 0.
    pub fn trace(&self, s: &TwoQubitState) -> SpectrumTrace {
        let probs = s.probabilities();
        let values = self
            .sector_photons
            .iter()
            .map(|n| {
                if self.params.epsilon == 0.0 {
                    0.0
                } else {
                    (0..4).map(|k| probs[k] * n[k]).sum::<f64>() / (2.0 * self.params.epsilon)
                }
            })
            .collect();
        SpectrumTrace {
            grid: self.grid.clone(),
            values,
            provenance: Provenance::Lindblad,
            source: Some(s.expectations()),
        }
    }
}

pub fn lindblad_spectrum(
    s: &TwoQubitState,
    p: &DispersiveParams,
    grid: &DetuningGrid,
    n_max: usize,
) -> Result<SpectrumTrace> {
    Ok(LindbladSweep::new(p, grid, n_max)?.trace(s))
}
