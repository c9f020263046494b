//! Single- and two-qubit unitaries.
//!
//! Rotations use the exp(+i·σ·θ) convention throughout, with
//! σz = |0⟩⟨0| − |1⟩⟨1|. Under this convention the published decompositions
//! (for example R_y(3π/4) = R_x(π/4)·R_z(3π/4)·R_x(3π/4)) hold only up to a
//! global phase, so gate comparison goes through [`phase_aligned_deviation`].

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex amplitude / matrix element.
pub type ComplexScalar = Complex64;

/// Tolerance for exact algebra (unitarity, normalization, gate identities).
pub const EXACT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Max element deviation between two equally sized matrices (row-major
/// element slices) after removing the global phase.
///
/// The phase reference is the largest-magnitude element of `a`; both
/// matrices are divided by their own phase at that position. Returns
/// `f64::INFINITY` when `b` vanishes at the reference position.
pub fn phase_aligned_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (k, ak) = a
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("non-empty matrix");
    let bk = b[k];
    if ak.norm() == 0.0 || bk.norm() < EXACT_TOL {
        return f64::INFINITY;
    }
    let pa = ak / ak.norm();
    let pb = bk / bk.norm();
    a.iter()
        .zip(b)
        .map(|(x, y)| (x / pa - y / pb).norm())
        .fold(0.0, f64::max)
}

fn check_finite(elems: &[Complex64]) -> Result<()> {
    if elems.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("matrix"))
    }
}

fn unitarity_deviation<const N: usize>(m: &[[Complex64; N]; N]) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            let acc: Complex64 = m.iter().map(|row| row[i].conj() * row[j]).sum();
            let target = if i == j { ONE } else { ZERO };
            dev = dev.max((acc - target).norm());
        }
    }
    dev
}

/// A 2×2 unitary acting on one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleQubitGate {
    m: [[Complex64; 2]; 2],
}

impl SingleQubitGate {
    /// Checked constructor: rejects non-finite or non-unitary matrices.
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        check_finite(m.as_flattened())?;
        let deviation = unitarity_deviation(&m);
        if deviation > EXACT_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { m })
    }

    fn from_closed_form(m: [[Complex64; 2]; 2]) -> Self {
        Self::new(m).expect("closed-form rotation is unitary")
    }

    pub fn identity() -> Self {
        Self {
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.m
    }

    pub fn dagger(&self) -> Self {
        let m = &self.m;
        Self {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    pub fn scaled(&self, phase: Complex64) -> Self {
        let mut m = self.m;
        m.as_flattened_mut().iter_mut().for_each(|z| *z *= phase);
        Self { m }
    }

    /// Max element deviation from `other` after global-phase alignment.
    pub fn deviation_up_to_phase(&self, other: &Self) -> f64 {
        phase_aligned_deviation(self.m.as_flattened(), other.m.as_flattened())
    }

    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        self.deviation_up_to_phase(other) < tol
    }

    /// Plain element-wise max deviation (no phase alignment).
    pub fn deviation(&self, other: &Self) -> f64 {
        self.m
            .as_flattened()
            .iter()
            .zip(other.m.as_flattened())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for SingleQubitGate {
    type Output = SingleQubitGate;

    /// Operator product: `(a * b)` applies `b` first.
    fn mul(self, rhs: Self) -> Self {
        let mut m = [[ZERO; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                *out = self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j];
            }
        }
        SingleQubitGate { m }
    }
}

/// exp(i·σx·θ).
pub fn rx(theta: f64) -> SingleQubitGate {
    let (s, c) = theta.sin_cos();
    SingleQubitGate::from_closed_form([[c.into(), I * s], [I * s, c.into()]])
}

/// exp(i·σy·θ) = [[cos θ, sin θ], [−sin θ, cos θ]].
pub fn ry(theta: f64) -> SingleQubitGate {
    let (s, c) = theta.sin_cos();
    SingleQubitGate::from_closed_form([[c.into(), s.into()], [(-s).into(), c.into()]])
}

/// exp(i·σz·θ) = diag(e^{iθ}, e^{−iθ}).
pub fn rz(theta: f64) -> SingleQubitGate {
    SingleQubitGate::from_closed_form([
        [Complex64::from_polar(1.0, theta), ZERO],
        [ZERO, Complex64::from_polar(1.0, -theta)],
    ])
}

/// The Hadamard-like encoding rotation
/// (1/√2)·[[1, i·e^{iθ}], [i·e^{−iθ}, 1]] = rz(θ/2)·rx(π/4)·rz(−θ/2).
pub fn hadamard_like(theta: f64) -> SingleQubitGate {
    let h = FRAC_1_SQRT_2;
    SingleQubitGate::from_closed_form([
        [h.into(), I * Complex64::from_polar(h, theta)],
        [I * Complex64::from_polar(h, -theta), h.into()],
    ])
}

/// A 4×4 unitary on the basis |00⟩, |01⟩, |10⟩, |11⟩ (qubit 1 leftmost).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitGate {
    m: [[Complex64; 4]; 4],
}

impl TwoQubitGate {
    pub fn new(m: [[Complex64; 4]; 4]) -> Result<Self> {
        check_finite(m.as_flattened())?;
        let deviation = unitarity_deviation(&m);
        if deviation > EXACT_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        let mut m = [[ZERO; 4]; 4];
        (0..4).for_each(|i| m[i][i] = ONE);
        Self { m }
    }

    /// `first ⊗ second`, with `first` acting on qubit 1.
    pub fn tensor(first: &SingleQubitGate, second: &SingleQubitGate) -> Self {
        let (a, b) = (first.matrix(), second.matrix());
        let mut m = [[ZERO; 4]; 4];
        for i1 in 0..2 {
            for i2 in 0..2 {
                for j1 in 0..2 {
                    for j2 in 0..2 {
                        m[2 * i1 + i2][2 * j1 + j2] = a[i1][j1] * b[i2][j2];
                    }
                }
            }
        }
        Self { m }
    }

    pub fn matrix(&self) -> &[[Complex64; 4]; 4] {
        &self.m
    }

    pub fn deviation(&self, other: &Self) -> f64 {
        self.m
            .as_flattened()
            .iter()
            .zip(other.m.as_flattened())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn deviation_up_to_phase(&self, other: &Self) -> f64 {
        phase_aligned_deviation(self.m.as_flattened(), other.m.as_flattened())
    }
}

impl Mul for TwoQubitGate {
    type Output = TwoQubitGate;

    fn mul(self, rhs: Self) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                *out = (0..4).map(|k| self.m[i][k] * rhs.m[k][j]).sum();
            }
        }
        TwoQubitGate { m }
    }
}

/// iSWAP: identity on |00⟩ and |11⟩, |01⟩ → i|10⟩, |10⟩ → i|01⟩.
pub fn iswap() -> TwoQubitGate {
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = ONE;
    m[1][2] = I;
    m[2][1] = I;
    m[3][3] = ONE;
    TwoQubitGate { m }
}

/// Diagonal phase δ = 6π(n + 1/2) picked up by |00⟩ (and −δ by |11⟩) during
/// the dispersive exchange of duration t_s = 3πΔ/2g², with n the mean
/// resonator photon number.
pub fn dispersive_phase(n_photon: f64) -> f64 {
    6.0 * PI * (n_photon + 0.5)
}

/// The gate generated by the dispersive XY exchange Hamiltonian after
/// t_s = 3πΔ/2g²: diag phases e^{±iδ} on |00⟩/|11⟩ and an i-swap of
/// |01⟩ ↔ |10⟩.
pub fn dispersive_two_qubit_gate(n_photon: f64) -> Result<TwoQubitGate> {
    if !n_photon.is_finite() || n_photon < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "photon number must be finite and non-negative, got {n_photon}"
        )));
    }
    let delta = dispersive_phase(n_photon);
    let mut m = iswap().m;
    m[0][0] = Complex64::from_polar(1.0, delta);
    m[3][3] = Complex64::from_polar(1.0, -delta);
    Ok(TwoQubitGate { m })
}

/// Single-qubit phase rotations |0⟩ → e^{−iδ/2}|0⟩, |1⟩ → e^{iδ/2}|1⟩ on both
/// qubits, i.e. rz(−δ/2) ⊗ rz(−δ/2), which turns the dispersive gate into
/// iSWAP when the photon number is known.
pub fn dispersive_phase_correction(n_photon: f64) -> TwoQubitGate {
    let half = dispersive_phase(n_photon) / 2.0;
    TwoQubitGate::tensor(&rz(-half), &rz(-half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_angle_rotations_are_identity() {
        let id = SingleQubitGate::identity();
        for g in [rx(0.0), ry(0.0), rz(0.0)] {
            assert_eq!(g.deviation(&id), 0.0);
        }
    }

    #[test]
    fn half_turns() {
        let i_sigma_x = SingleQubitGate::new([[c(0., 0.), I], [I, c(0., 0.)]]).unwrap();
        assert!(rx(FRAC_PI_2).deviation(&i_sigma_x) < EXACT_TOL);
        let minus_id = SingleQubitGate::identity().scaled(c(-1.0, 0.0));
        assert!(rz(PI).deviation(&minus_id) < EXACT_TOL);
        assert!(rz(PI).approx_eq_up_to_phase(&SingleQubitGate::identity(), EXACT_TOL));
    }

    #[test]
    fn ry_three_quarter_decomposition() {
        let product = rx(FRAC_PI_4) * rz(3.0 * FRAC_PI_4) * rx(3.0 * FRAC_PI_4);
        let target = ry(3.0 * FRAC_PI_4);
        assert!(product.deviation_up_to_phase(&target) < EXACT_TOL);
        // the product carries a global −1 relative to exp(iσy·3π/4)
        assert!(product.deviation(&target.scaled(c(-1.0, 0.0))) < EXACT_TOL);
    }

    #[test]
    fn ry_quarter_decomposition() {
        let product = rz(FRAC_PI_4) * rx(3.0 * FRAC_PI_4) * rz(3.0 * FRAC_PI_4);
        assert!(product.deviation_up_to_phase(&ry(FRAC_PI_4)) < EXACT_TOL);
    }

    #[test]
    fn hadamard_like_special_angles() {
        assert!(hadamard_like(0.0).deviation(&rx(FRAC_PI_4)) < EXACT_TOL);
        assert!(hadamard_like(PI).deviation(&rx(-FRAC_PI_4)) < EXACT_TOL);
    }

    #[test]
    fn hadamard_like_matches_rotation_product() {
        for k in 0..24 {
            let theta = -3.0 + 0.37 * k as f64;
            let product = rz(theta / 2.0) * rx(FRAC_PI_4) * rz(-theta / 2.0);
            assert!(product.deviation(&hadamard_like(theta)) < EXACT_TOL, "θ = {theta}");
        }
    }

    #[test]
    fn rejects_non_unitary() {
        let m = [[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(matches!(SingleQubitGate::new(m), Err(Error::NotUnitary { .. })));
        let nan = [[c(f64::NAN, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert_eq!(SingleQubitGate::new(nan), Err(Error::NonFinite("matrix")));
    }

    #[test]
    fn dispersive_gate_zero_photons() {
        let g = dispersive_two_qubit_gate(0.0).unwrap();
        assert!((g.matrix()[0][0] - c(-1.0, 0.0)).norm() < EXACT_TOL);
        assert!((g.matrix()[3][3] - c(-1.0, 0.0)).norm() < EXACT_TOL);
        assert!(TwoQubitGate::new(*g.matrix()).is_ok());
    }

    #[test]
    fn phase_corrected_dispersive_gate_is_iswap() {
        for n in [0.0, 1.0, 2.0, 7.0, 0.3, 2.75] {
            let g = dispersive_phase_correction(n) * dispersive_two_qubit_gate(n).unwrap();
            assert!(g.deviation(&iswap()) < EXACT_TOL, "n = {n}");
        }
        assert!(dispersive_two_qubit_gate(-1.0).is_err());
    }

    #[test]
    fn iswap_squared_negates_odd_parity() {
        let sq = iswap() * iswap();
        assert!((sq.matrix()[1][1] - c(-1.0, 0.0)).norm() < EXACT_TOL);
        assert!((sq.matrix()[0][0] - ONE).norm() < EXACT_TOL);
    }

    #[test]
    fn phase_alignment_ignores_global_phase() {
        let g = ry(0.7) * rz(0.2);
        let shifted = g.scaled(Complex64::from_polar(1.0, 2.1));
        assert!(g.deviation(&shifted) > 0.1);
        assert!(g.deviation_up_to_phase(&shifted) < EXACT_TOL);
    }
}
