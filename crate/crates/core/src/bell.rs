//! Bell-state generation, interference-based confirmation, and the
//! Hadamard-like encoding of classical local variables.
//!
//! Generation from |00⟩ runs three steps:
//!
//! 1. rx(π/4) on both qubits: |00⟩ → ½(|0⟩+i|1⟩)(|0⟩+i|1⟩)
//! 2. iSWAP: → ½(|00⟩ − |01⟩ − |10⟩ − |11⟩)
//! 3. ry(3π/4) on qubit 1: → −(|00⟩ − |11⟩)/√2
//!
//! The output carries a global phase of −1 relative to |Φ−⟩; all assertions
//! on it are fidelity based.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{
    hadamard_like, iswap, rx, ry, rz, LogicState, Qubit, TwoQubitState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    /// The ideal state (|00⟩ ± |11⟩)/√2 or (|01⟩ ± |10⟩)/√2.
    pub fn state(self) -> TwoQubitState {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let amps = match self {
            BellLabel::PhiPlus => [h, z, z, h],
            BellLabel::PhiMinus => [h, z, z, -h],
            BellLabel::PsiPlus => [z, h, h, z],
            BellLabel::PsiMinus => [z, h, -h, z],
        };
        TwoQubitState::new(amps).expect("Bell states are normalized")
    }

    pub fn name(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "phi-plus",
            BellLabel::PhiMinus => "phi-minus",
            BellLabel::PsiPlus => "psi-plus",
            BellLabel::PsiMinus => "psi-minus",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for BellLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BellLabel::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown Bell label `{s}`")))
    }
}

/// Intermediate states of the generation sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparationTrace {
    pub after_local_rotations: TwoQubitState,
    pub after_iswap: TwoQubitState,
    pub output: TwoQubitState,
}

pub fn prepare_bell_traced() -> PreparationTrace {
    let quarter = rx(FRAC_PI_4);
    let after_local_rotations = TwoQubitState::basis(LogicState::S00).apply_local(&quarter, &quarter);
    let after_iswap = after_local_rotations.apply_two(&iswap());
    let output = after_iswap.apply_single(&ry(3.0 * FRAC_PI_4), Qubit::One);
    PreparationTrace {
        after_local_rotations,
        after_iswap,
        output,
    }
}

/// Runs the three-step sequence on |00⟩; the result is |Φ−⟩ up to global phase.
pub fn prepare_bell() -> TwoQubitState {
    prepare_bell_traced().output
}

/// Any Bell state, obtained from [`prepare_bell`] by a single-qubit
/// post-rotation:
///
/// | label | post-rotation              |
/// |-------|----------------------------|
/// | Φ−    | none                       |
/// | Φ+    | rz(π/2) on qubit 1 (= iσz) |
/// | Ψ−    | rx(π/2) on qubit 2 (= iσx) |
/// | Ψ+    | ry(π/4) on both qubits     |
pub fn prepare_bell_label(label: BellLabel) -> TwoQubitState {
    let s = prepare_bell();
    match label {
        BellLabel::PhiMinus => s,
        BellLabel::PhiPlus => s.apply_single(&rz(FRAC_PI_2), Qubit::One),
        BellLabel::PsiMinus => s.apply_single(&rx(FRAC_PI_2), Qubit::Two),
        BellLabel::PsiPlus => s.apply_local(&ry(FRAC_PI_4), &ry(FRAC_PI_4)),
    }
}

/// The two probability vectors of the confirmation protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Confirmation {
    /// Computational-basis probabilities of the state itself.
    pub direct: [f64; 4],
    /// Probabilities after ry(π/4) on each qubit.
    pub rotated: [f64; 4],
}

pub fn confirm_projective(s: &TwoQubitState) -> Confirmation {
    let q = ry(FRAC_PI_4);
    Confirmation {
        direct: s.probabilities(),
        rotated: s.apply_local(&q, &q).probabilities(),
    }
}

/// Confirmation statistics of the equal classical mixture of |00⟩ and |11⟩,
/// computed as the average of the two pure-state outcomes.
pub fn confirm_mixture_baseline() -> Confirmation {
    let a = confirm_projective(&TwoQubitState::basis(LogicState::S00));
    let b = confirm_projective(&TwoQubitState::basis(LogicState::S11));
    let avg = |x: [f64; 4], y: [f64; 4]| std::array::from_fn(|i| 0.5 * (x[i] + y[i]));
    Confirmation {
        direct: avg(a.direct, b.direct),
        rotated: avg(a.rotated, b.rotated),
    }
}

/// Applies the Hadamard-like rotations R(θ1) ⊗ R(θ2).
pub fn encode(s: &TwoQubitState, theta1: f64, theta2: f64) -> TwoQubitState {
    s.apply_local(&hadamard_like(theta1), &hadamard_like(theta2))
}

/// E(θ1, θ2) = cos(θ1 + θ2) for the encoded |Φ−⟩.
pub fn analytic_correlation(theta1: f64, theta2: f64) -> f64 {
    (theta1 + theta2).cos()
}

/// The four local variables {θ1, θ2, θ1', θ2'} of a CHSH run (radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleSet {
    pub theta1: f64,
    pub theta2: f64,
    pub theta1p: f64,
    pub theta2p: f64,
}

impl AngleSet {
    pub fn new(theta1: f64, theta2: f64, theta1p: f64, theta2p: f64) -> Result<Self> {
        let a = Self {
            theta1,
            theta2,
            theta1p,
            theta2p,
        };
        if a.as_array().iter().all(|t| t.is_finite()) {
            Ok(a)
        } else {
            Err(Error::NonFinite("angle set"))
        }
    }

    /// {π/4, 3π/4, π/2, π}: f = √2 + 1.
    pub fn set1() -> Self {
        Self::new(FRAC_PI_4, 3.0 * FRAC_PI_4, FRAC_PI_2, PI).unwrap()
    }

    /// {π/4, 0, 7π/4, 3π/2}: f = 2√2.
    pub fn set2() -> Self {
        Self::new(FRAC_PI_4, 0.0, 7.0 * FRAC_PI_4, 3.0 * FRAC_PI_2).unwrap()
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.theta1, self.theta2, self.theta1p, self.theta2p]
    }

    /// Angle pairs in report order: (θ1,θ2), (θ1',θ2), (θ1,θ2'), (θ1',θ2').
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.theta1, self.theta2),
            (self.theta1p, self.theta2),
            (self.theta1, self.theta2p),
            (self.theta1p, self.theta2p),
        ]
    }

    /// Angles reduced to [0, 2π) for display; the stored values are untouched.
    pub fn reduced(&self) -> [f64; 4] {
        self.as_array().map(|t| t.rem_euclid(TAU))
    }
}
