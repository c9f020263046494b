//! Gate durations and the experiment time budget.
//!
//! Durations follow the dispersive-drive expressions for each rotation:
//!
//! * rx(φ): t = −φ·Δr/(ε·g_j), Δr = ω_d − ω_r (so rx(π/4) takes −πΔr/4εg_j)
//! * rz(φ): t = 4φ·Δa / [2(Δa + g_j²/Δ_j)Δa + (2εg_j/Δr)²], Δa = ω_j − ω_d
//! * iSWAP: t_s = 3πΔ/(2g²)

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bell::AngleSet;
use crate::config::DeviceConfig;
use crate::error::{Error, Result};

/// Relative coupling mismatch tolerated by the iSWAP duration.
pub const COUPLING_MATCH_TOL: f64 = 0.01;

fn check_qubit(qubit: u8) -> Result<()> {
    if qubit == 1 || qubit == 2 {
        Ok(())
    } else {
        Err(Error::InvalidQubit(qubit))
    }
}

fn positive_duration(t: f64, what: &str) -> Result<f64> {
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(Error::Config(format!("{what}: non-positive duration {t} ns")))
    }
}

/// Duration of rx(`angle`) on `qubit` driven at `omega_d`.
pub fn duration_rx(angle: f64, cfg: &DeviceConfig, omega_d: f64, qubit: u8) -> Result<f64> {
    check_qubit(qubit)?;
    let delta_r = omega_d - cfg.omega_r;
    if delta_r == 0.0 {
        return Err(Error::Config("rx drive resonant with the resonator".into()));
    }
    positive_duration(-angle * delta_r / (cfg.epsilon * cfg.coupling(qubit)), "rx")
}

/// Duration of rz(`angle`) on `qubit` driven at `omega_d`.
pub fn duration_rz(angle: f64, cfg: &DeviceConfig, omega_d: f64, qubit: u8) -> Result<f64> {
    check_qubit(qubit)?;
    let g = cfg.coupling(qubit);
    let delta_q = cfg.qubit_detuning(qubit);
    let delta_a = cfg.qubit_frequency(qubit) - omega_d;
    let delta_r = omega_d - cfg.omega_r;
    if delta_r == 0.0 {
        return Err(Error::Config("rz drive resonant with the resonator".into()));
    }
    let denom = 2.0 * (delta_a + g * g / delta_q) * delta_a + (2.0 * cfg.epsilon * g / delta_r).powi(2);
    if !(denom > 0.0) {
        return Err(Error::Config(format!("rz duration denominator is {denom}")));
    }
    positive_duration(4.0 * angle * delta_a / denom, "rz")
}

/// t_s = 3πΔ/(2g²); requires g1 = g2 within 1 %.
pub fn duration_iswap(cfg: &DeviceConfig, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Config(format!("iSWAP detuning must be positive, got {delta}")));
    }
    let mismatch = (cfg.g_1 - cfg.g_2).abs() / cfg.g_1.max(cfg.g_2);
    if mismatch > COUPLING_MATCH_TOL {
        return Err(Error::Config(format!(
            "iSWAP needs matched couplings; g1 and g2 differ by {:.1} %",
            100.0 * mismatch
        )));
    }
    let g = cfg.g_1;
    positive_duration(3.0 * PI * delta / (2.0 * g * g), "iSWAP")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Segment {
    Generation,
    Confirmation,
    ChshTest,
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Segment::Generation => "generation",
            Segment::Confirmation => "confirmation",
            Segment::ChshTest => "chsh-test",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub segment: Segment,
    pub name: String,
    /// Drive frequency (rad/ns); `None` for undriven steps.
    pub omega_d: Option<f64>,
    pub duration_ns: f64,
}

/// How gate durations compose into segment totals.
///
/// The default reproduces the published estimates (about 60.5, 93, 160 and
/// 313.5 ns):
///
/// * generation: rx(π/4) on qubit 1 then on qubit 2 (sequential), the iSWAP,
///   and ry(3π/4) on qubit 1 as rx(3π/4), rz(3π/4), rx(π/4);
/// * confirmation: one direct joint measurement, ry(π/4) on each qubit as
///   rz(3π/4), rx(3π/4), rz(π/4), and a second joint measurement;
/// * CHSH test: one joint measurement per angle pair, encoding rotations
///   not counted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetPolicy {
    pub measurement_ns: f64,
    /// The two initial rx(π/4) rotations run one after the other (true) or simultaneously,
    /// counted once at the longer duration (false).
    pub sequential_state_rotations: bool,
    pub confirmation_measurements: u32,
    pub chsh_measurements: u32,
    /// When set, the Hadamard-like encodings of these angles are added to the
    /// CHSH segment.
    pub encoding_angles: Option<AngleSet>,
}

impl Default for BudgetPolicy {
    fn default() -> Self {
        Self {
            measurement_ns: 40.0,
            sequential_state_rotations: true,
            confirmation_measurements: 2,
            chsh_measurements: 4,
            encoding_angles: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub entries: Vec<ScheduleEntry>,
    pub generation_ns: f64,
    pub confirmation_ns: f64,
    pub chsh_test_ns: f64,
    pub total_ns: f64,
    pub t2_ns: f64,
    /// T2 minus the grand total.
    pub margin_ns: f64,
    pub feasible: bool,
    pub policy: BudgetPolicy,
}

impl PulseSchedule {
    pub fn segment_total(&self, segment: Segment) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.segment == segment)
            .map(|e| e.duration_ns)
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }
}

impl fmt::Display for PulseSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<13} {:<26} {:>14} {:>10}", "segment", "step", "ω_d/2π (GHz)", "t (ns)")?;
        for e in &self.entries {
            let wd = e
                .omega_d
                .map(|w| format!("{:.4}", crate::units::to_ghz(w)))
                .unwrap_or_else(|| "-".into());
            writeln!(f, "{:<13} {:<26} {:>14} {:>10.3}", e.segment, e.name, wd, e.duration_ns)?;
        }
        writeln!(f)?;
        writeln!(f, "generation    {:>9.2} ns", self.generation_ns)?;
        writeln!(f, "confirmation  {:>9.2} ns", self.confirmation_ns)?;
        writeln!(f, "chsh test     {:>9.2} ns", self.chsh_test_ns)?;
        writeln!(f, "total         {:>9.2} ns", self.total_ns)?;
        writeln!(
            f,
            "T2 = {:.1} ns, margin {:.2} ns: {}",
            self.t2_ns,
            self.margin_ns,
            if self.feasible { "feasible" } else { "infeasible" }
        )
    }
}

struct Builder<'a> {
    cfg: &'a DeviceConfig,
    entries: Vec<ScheduleEntry>,
}

impl Builder<'_> {
    fn push(&mut self, segment: Segment, name: String, omega_d: Option<f64>, duration_ns: f64) {
        self.entries.push(ScheduleEntry {
            segment,
            name,
            omega_d,
            duration_ns,
        });
    }

    fn rx(&mut self, segment: Segment, angle: f64, label: &str, qubit: u8) -> Result<()> {
        let wd = self.cfg.drive.omega_d_rx;
        let t = duration_rx(angle, self.cfg, wd, qubit)?;
        self.push(segment, format!("rx({label}) q{qubit}"), Some(wd), t);
        Ok(())
    }

    fn rz(&mut self, segment: Segment, angle: f64, label: &str, qubit: u8) -> Result<()> {
        // rz(φ + π) = −rz(φ): only the angle modulo π needs to be driven
        let angle = angle.rem_euclid(PI);
        if angle == 0.0 {
            return Ok(());
        }
        let wd = self.cfg.drive.omega_d_rz;
        let t = duration_rz(angle, self.cfg, wd, qubit)?;
        self.push(segment, format!("rz({label}) q{qubit}"), Some(wd), t);
        Ok(())
    }

    fn measure(&mut self, segment: Segment, ns: f64) {
        self.push(segment, "joint spectral measurement".into(), None, ns);
    }
}

/// Composes the full experiment budget and compares it against T2.
pub fn full_budget(cfg: &DeviceConfig, policy: &BudgetPolicy) -> Result<PulseSchedule> {
    cfg.validate()?;
    if !(policy.measurement_ns >= 0.0) {
        return Err(Error::Config("measurement time must be non-negative".into()));
    }
    let mut b = Builder {
        cfg,
        entries: Vec::new(),
    };
    let quarter = FRAC_PI_4;
    let three_quarter = 3.0 * FRAC_PI_4;

    use Segment::*;
    if policy.sequential_state_rotations {
        b.rx(Generation, quarter, "π/4", 1)?;
        b.rx(Generation, quarter, "π/4", 2)?;
    } else {
        let wd = cfg.drive.omega_d_rx;
        let t = duration_rx(quarter, cfg, wd, 1)?.max(duration_rx(quarter, cfg, wd, 2)?);
        b.push(Generation, "rx(π/4) q1 ∥ q2".into(), Some(wd), t);
    }
    let ts = duration_iswap(cfg, cfg.drive.iswap_detuning)?;
    b.push(Generation, "iSWAP".into(), None, ts);
    // ry(3π/4) = rx(π/4)·rz(3π/4)·rx(3π/4), rightmost first
    b.rx(Generation, three_quarter, "3π/4", 1)?;
    b.rz(Generation, three_quarter, "3π/4", 1)?;
    b.rx(Generation, quarter, "π/4", 1)?;

    let measurements = policy.confirmation_measurements;
    if measurements > 0 {
        b.measure(Confirmation, policy.measurement_ns);
    }
    for q in [1, 2] {
        // ry(π/4) = rz(π/4)·rx(3π/4)·rz(3π/4)
        b.rz(Confirmation, three_quarter, "3π/4", q)?;
        b.rx(Confirmation, three_quarter, "3π/4", q)?;
        b.rz(Confirmation, quarter, "π/4", q)?;
    }
    for _ in 1..measurements {
        b.measure(Confirmation, policy.measurement_ns);
    }

    let pairs = policy.encoding_angles.map(|a| a.pairs());
    for k in 0..policy.chsh_measurements as usize {
        if let Some((t1, t2)) = pairs.and_then(|p| p.get(k).copied()) {
            for (q, theta) in [(1u8, t1), (2u8, t2)] {
                // R(θ) = rz(θ/2)·rx(π/4)·rz(−θ/2)
                b.rz(ChshTest, -theta / 2.0, "−θ/2", q)?;
                b.rx(ChshTest, quarter, "π/4", q)?;
                b.rz(ChshTest, theta / 2.0, "θ/2", q)?;
            }
        }
        b.measure(ChshTest, policy.measurement_ns);
    }

    let entries = b.entries;
    let sum = |s: Segment| entries.iter().filter(|e| e.segment == s).map(|e| e.duration_ns).sum::<f64>();
    let generation_ns = sum(Generation);
    let confirmation_ns = sum(Confirmation);
    let chsh_test_ns = sum(ChshTest);
    let total_ns = generation_ns + confirmation_ns + chsh_test_ns;
    Ok(PulseSchedule {
        entries,
        generation_ns,
        confirmation_ns,
        chsh_test_ns,
        total_ns,
        t2_ns: cfg.t2_dephase,
        margin_ns: cfg.t2_dephase - total_ns,
        feasible: total_ns < cfg.t2_dephase,
        policy: *policy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::ghz;

    // hand-evaluated from the closed forms with the default device
    const T1: f64 = 1.528_038_847_117_794_8;
    const T4: f64 = 4.584_116_541_353_384;
    const T3: f64 = 1.476_444_465_969_081_6;
    const TS: f64 = 50.031_092_769_517_76;

    #[test]
    fn rx_durations() {
        let cfg = DeviceConfig::reference();
        let wd = cfg.drive.omega_d_rx;
        assert!((duration_rx(FRAC_PI_4, &cfg, wd, 1).unwrap() - T1).abs() < 1e-9);
        assert!((duration_rx(3.0 * FRAC_PI_4, &cfg, wd, 1).unwrap() - T4).abs() < 1e-9);
        assert!((duration_rx(FRAC_PI_4, &cfg, wd, 2).unwrap() - T1).abs() < 1e-9);
        let mut strong = cfg;
        strong.epsilon *= 2.0;
        assert!((duration_rx(FRAC_PI_4, &strong, wd, 1).unwrap() - T1 / 2.0).abs() < 1e-9);
    }

    #[test]
    fn blue_detuned_rx_is_rejected() {
        let cfg = DeviceConfig::reference();
        assert!(matches!(duration_rx(FRAC_PI_4, &cfg, ghz(7.0), 1), Err(Error::Config(_))));
        assert!(matches!(duration_rx(FRAC_PI_4, &cfg, cfg.omega_r, 1), Err(Error::Config(_))));
        assert_eq!(duration_rx(FRAC_PI_4, &cfg, ghz(4.0), 3), Err(Error::InvalidQubit(3)));
    }

    #[test]
    fn rz_duration_and_weak_drive_limit() {
        let cfg = DeviceConfig::reference();
        let t3 = duration_rz(3.0 * FRAC_PI_4, &cfg, ghz(4.0), 1).unwrap();
        assert!((t3 - T3).abs() < 1e-9);
        let mut weak = cfg;
        weak.epsilon = 1e-9;
        let delta_a = cfg.omega_1 - ghz(4.0);
        let limit = 3.0 * PI
            / (2.0 * delta_a * (1.0 + cfg.g_1 * cfg.g_1 / (cfg.qubit_detuning(1) * delta_a)));
        let t = duration_rz(3.0 * FRAC_PI_4, &weak, ghz(4.0), 1).unwrap();
        assert!((t - limit).abs() < 1e-9 * limit);
    }

    #[test]
    fn iswap_duration() {
        let cfg = DeviceConfig::reference();
        assert!((duration_iswap(&cfg, ghz(1.18)).unwrap() - TS).abs() < 1e-9);
        let mut doubled = cfg;
        doubled.g_1 *= 2.0;
        doubled.g_2 *= 2.0;
        assert!((duration_iswap(&doubled, ghz(1.18)).unwrap() - TS / 4.0).abs() < 1e-9);
        let mut mismatched = cfg;
        mismatched.g_2 *= 1.05;
        assert!(matches!(duration_iswap(&mismatched, ghz(1.18)), Err(Error::Config(_))));
        assert!(duration_iswap(&cfg, 0.0).is_err());
    }

    #[test]
    fn default_budget_matches_estimates() {
        let s = full_budget(&DeviceConfig::reference(), &BudgetPolicy::default()).unwrap();
        assert!((s.generation_ns - 60.5).abs() < 1.0, "{}", s.generation_ns);
        assert!((s.confirmation_ns - 93.0).abs() < 1.0, "{}", s.confirmation_ns);
        assert!((s.chsh_test_ns - 160.0).abs() < 1.0);
        assert!((s.total_ns - 313.5).abs() < 1.0, "{}", s.total_ns);
        assert!(s.feasible);
        assert_eq!(s.total_ns, s.generation_ns + s.confirmation_ns + s.chsh_test_ns);
        for seg in [Segment::Generation, Segment::Confirmation, Segment::ChshTest] {
            assert!(s.entries.iter().all(|e| e.duration_ns > 0.0));
            assert!(s.segment_total(seg) > 0.0);
        }
    }

    #[test]
    fn measurement_time_is_additive() {
        let cfg = DeviceConfig::reference();
        let with = full_budget(&cfg, &BudgetPolicy::default()).unwrap();
        let without = full_budget(
            &cfg,
            &BudgetPolicy {
                measurement_ns: 0.0,
                ..BudgetPolicy::default()
            },
        )
        .unwrap();
        assert!((with.confirmation_ns - without.confirmation_ns - 80.0).abs() < 1e-9);
        assert!((with.chsh_test_ns - without.chsh_test_ns - 160.0).abs() < 1e-9);
        assert!((with.generation_ns - without.generation_ns).abs() < 1e-12);
    }

    #[test]
    fn parallel_rotations_shorten_generation() {
        let cfg = DeviceConfig::reference();
        let seq = full_budget(&cfg, &BudgetPolicy::default()).unwrap();
        let par = full_budget(
            &cfg,
            &BudgetPolicy {
                sequential_state_rotations: false,
                ..BudgetPolicy::default()
            },
        )
        .unwrap();
        assert!((seq.generation_ns - par.generation_ns - T1).abs() < 1e-9);
    }

    #[test]
    fn short_t2_is_infeasible() {
        let mut cfg = DeviceConfig::reference();
        cfg.t2_dephase = 200.0;
        let s = full_budget(&cfg, &BudgetPolicy::default()).unwrap();
        assert!(!s.feasible);
        assert!(s.margin_ns < 0.0);
    }

    #[test]
    fn encoding_rotations_extend_test_segment() {
        let cfg = DeviceConfig::reference();
        let s = full_budget(
            &cfg,
            &BudgetPolicy {
                encoding_angles: Some(AngleSet::set1()),
                ..BudgetPolicy::default()
            },
        )
        .unwrap();
        assert!(s.chsh_test_ns > 160.0 + 8.0 * T1 - 1e-9);
    }

    #[test]
    fn json_round_trip() {
        let s = full_budget(&DeviceConfig::reference(), &BudgetPolicy::default()).unwrap();
        assert_eq!(PulseSchedule::from_json(&s.to_json()).unwrap(), s);
    }
}
