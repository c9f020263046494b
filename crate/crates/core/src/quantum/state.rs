use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::gate::{SingleQubitGate, TwoQubitGate, EXACT_TOL};
use crate::error::{Error, Result};

/// Which qubit a single-qubit gate acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Qubit {
    One,
    Two,
}

impl TryFrom<u8> for Qubit {
    type Error = Error;

    fn try_from(index: u8) -> Result<Self> {
        match index {
            1 => Ok(Qubit::One),
            2 => Ok(Qubit::Two),
            other => Err(Error::InvalidQubit(other)),
        }
    }
}

/// Computational basis states, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LogicState {
    S00,
    S01,
    S10,
    S11,
}

impl LogicState {
    pub const ALL: [LogicState; 4] = [Self::S00, Self::S01, Self::S10, Self::S11];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        ["00", "01", "10", "11"][self.index()]
    }

    /// Both qubits found in the same logic state.
    pub fn is_same(self) -> bool {
        matches!(self, Self::S00 | Self::S11)
    }

    /// σz eigenvalues (qubit 1, qubit 2); σz|0⟩ = +|0⟩.
    pub fn z_eigenvalues(self) -> (f64, f64) {
        match self {
            Self::S00 => (1.0, 1.0),
            Self::S01 => (1.0, -1.0),
            Self::S10 => (-1.0, 1.0),
            Self::S11 => (-1.0, -1.0),
        }
    }
}

impl fmt::Display for LogicState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}⟩", self.label())
    }
}

/// Pure two-qubit state. Amplitudes are stored in the order
/// |00⟩, |01⟩, |10⟩, |11⟩ with qubit 1 as the left (most significant) label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitState {
    amps: [Complex64; 4],
}

impl TwoQubitState {
    /// Checked constructor; the amplitudes must already be normalized.
    pub fn new(amps: [Complex64; 4]) -> Result<Self> {
        if !amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > EXACT_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amps })
    }

    /// Rescales arbitrary non-zero amplitudes onto the unit sphere.
    pub fn normalized(amps: [Complex64; 4]) -> Result<Self> {
        if !amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm_sqr: 0.0 });
        }
        Ok(Self {
            amps: amps.map(|z| z / norm),
        })
    }

    pub fn basis(state: LogicState) -> Self {
        let mut amps = [Complex64::new(0.0, 0.0); 4];
        amps[state.index()] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// Haar-random pure state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let amps: [Complex64; 4] = std::array::from_fn(|_| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            if let Ok(s) = Self::normalized(amps) {
                return s;
            }
        }
    }

    /// Product state |a⟩ ⊗ |b⟩ from two single-qubit amplitude pairs.
    pub fn product(a: [Complex64; 2], b: [Complex64; 2]) -> Result<Self> {
        Self::normalized([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amps
    }

    pub fn amplitude(&self, state: LogicState) -> Complex64 {
        self.amps[state.index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Multiplies every amplitude by a unit-modulus phase.
    pub fn with_global_phase(&self, angle: f64) -> Self {
        let p = Complex64::from_polar(1.0, angle);
        Self {
            amps: self.amps.map(|z| z * p),
        }
    }

    /// Embeds `gate` as gate ⊗ I (qubit 1) or I ⊗ gate (qubit 2).
    pub fn apply_single(&self, gate: &SingleQubitGate, which: Qubit) -> Self {
        let m = gate.matrix();
        let a = &self.amps;
        let mut out = [Complex64::new(0.0, 0.0); 4];
        match which {
            Qubit::One => {
                for low in 0..2 {
                    out[low] = m[0][0] * a[low] + m[0][1] * a[2 + low];
                    out[2 + low] = m[1][0] * a[low] + m[1][1] * a[2 + low];
                }
            }
            Qubit::Two => {
                for high in [0, 2] {
                    out[high] = m[0][0] * a[high] + m[0][1] * a[high + 1];
                    out[high + 1] = m[1][0] * a[high] + m[1][1] * a[high + 1];
                }
            }
        }
        Self { amps: out }
    }

    /// Applies `first` to qubit 1 and `second` to qubit 2.
    pub fn apply_local(&self, first: &SingleQubitGate, second: &SingleQubitGate) -> Self {
        self.apply_single(first, Qubit::One)
            .apply_single(second, Qubit::Two)
    }

    pub fn apply_two(&self, gate: &TwoQubitGate) -> Self {
        let m = gate.matrix();
        let amps = std::array::from_fn(|i| (0..4).map(|k| m[i][k] * self.amps[k]).sum());
        Self { amps }
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.amps.map(|z| z.norm_sqr())
    }

    pub fn expectations(&self) -> Expectations {
        Expectations::from_probabilities(self.probabilities())
    }
}

/// Computational-basis statistics of a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    /// ⟨σz1⟩ = P00 + P01 − P10 − P11
    pub z1: f64,
    /// ⟨σz2⟩ = P00 − P01 + P10 − P11
    pub z2: f64,
    /// ⟨σz1σz2⟩ = P00 − P01 − P10 + P11
    pub zz: f64,
    /// (P00, P01, P10, P11)
    pub probs: [f64; 4],
}

impl Expectations {
    pub fn from_probabilities(probs: [f64; 4]) -> Self {
        let [p00, p01, p10, p11] = probs;
        Self {
            z1: p00 + p01 - p10 - p11,
            z2: p00 - p01 + p10 - p11,
            zz: p00 - p01 - p10 + p11,
            probs,
        }
    }

    /// Probability vector with the roles of |00⟩↔|11⟩ and |01⟩↔|10⟩ swapped.
    pub fn reversed(&self) -> Self {
        let mut p = self.probs;
        p.reverse();
        Self::from_probabilities(p)
    }
}

#[cfg(test)]
mod tests {
    use super::super::gate::{iswap, rx};
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn qubit_index_validation() {
        assert_eq!(Qubit::try_from(1), Ok(Qubit::One));
        assert_eq!(Qubit::try_from(2), Ok(Qubit::Two));
        assert_eq!(Qubit::try_from(3), Err(Error::InvalidQubit(3)));
        assert_eq!(Qubit::try_from(0), Err(Error::InvalidQubit(0)));
    }

    #[test]
    fn identity_application_is_exact() {
        let s = TwoQubitState::normalized([c(0.3, 0.1), c(-0.2, 0.5), c(0.0, 0.7), c(0.4, -0.1)])
            .unwrap();
        assert_eq!(s.apply_single(&SingleQubitGate::identity(), Qubit::One), s);
        assert_eq!(s.apply_single(&SingleQubitGate::identity(), Qubit::Two), s);
        assert_eq!(s.apply_two(&TwoQubitGate::identity()), s);
    }

    #[test]
    fn first_step_superposition() {
        let s = TwoQubitState::basis(LogicState::S00)
            .apply_single(&rx(FRAC_PI_4), Qubit::One)
            .apply_single(&rx(FRAC_PI_4), Qubit::Two);
        let expected = [c(0.5, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(-0.5, 0.0)];
        for (a, b) in s.amplitudes().iter().zip(expected) {
            assert!((a - b).norm() < EXACT_TOL);
        }
    }

    #[test]
    fn qubit_embedding_order() {
        // rx(π/2) = iσx flips only the addressed qubit
        let s = TwoQubitState::basis(LogicState::S00);
        let flipped1 = s.apply_single(&rx(std::f64::consts::FRAC_PI_2), Qubit::One);
        assert!((flipped1.amplitude(LogicState::S10) - c(0.0, 1.0)).norm() < EXACT_TOL);
        let flipped2 = s.apply_single(&rx(std::f64::consts::FRAC_PI_2), Qubit::Two);
        assert!((flipped2.amplitude(LogicState::S01) - c(0.0, 1.0)).norm() < EXACT_TOL);
    }

    #[test]
    fn iswap_on_basis() {
        let s = TwoQubitState::basis(LogicState::S01).apply_two(&iswap());
        assert!((s.amplitude(LogicState::S10) - c(0.0, 1.0)).norm() < EXACT_TOL);
        let twice = TwoQubitState::basis(LogicState::S01)
            .apply_two(&iswap())
            .apply_two(&iswap());
        assert!((twice.amplitude(LogicState::S01) - c(-1.0, 0.0)).norm() < EXACT_TOL);
    }

    #[test]
    fn expectations_of_simple_states() {
        let e = TwoQubitState::basis(LogicState::S00).expectations();
        assert_eq!((e.z1, e.z2, e.zz, e.probs), (1.0, 1.0, 1.0, [1.0, 0.0, 0.0, 0.0]));

        let h = FRAC_1_SQRT_2;
        let phi_minus = TwoQubitState::new([c(h, 0.), c(0., 0.), c(0., 0.), c(-h, 0.)]).unwrap();
        let e = phi_minus.expectations();
        assert!(e.z1.abs() < EXACT_TOL && e.z2.abs() < EXACT_TOL);
        assert!((e.zz - 1.0).abs() < EXACT_TOL);
        assert!((e.probs[0] - 0.5).abs() < EXACT_TOL && (e.probs[3] - 0.5).abs() < EXACT_TOL);
    }

    #[test]
    fn constructor_validation() {
        assert!(matches!(
            TwoQubitState::new([c(1.0, 0.), c(1.0, 0.), c(0., 0.), c(0., 0.)]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(TwoQubitState::normalized([c(0., 0.); 4]).is_err());
        assert_eq!(
            TwoQubitState::normalized([c(f64::INFINITY, 0.), c(0., 0.), c(0., 0.), c(0., 0.)]),
            Err(Error::NonFinite("state amplitudes"))
        );
    }
}
