//! Device configuration and its key-value text format.
//!
//! One entry per line, `key = value unit`, with `#` starting a comment:
//!
//! ```text
//! omega_r    = 6.442 GHz
//! g_1        = 133 MHz
//! t2_dephase = 500 ns
//! ```
//!
//! Frequency units (`GHz`, `MHz`, `kHz`, `Hz`) denote ordinary frequencies
//! and are converted to angular frequency in rad/ns; `rad/ns` is taken as
//! is. Time units are `ns`, `us` (or `μs`) and `ms`. A bare number is
//! dimensionless.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{ghz, mhz};

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "CQED_BELL_CONFIG";

/// Built-in configuration: the device of the timing estimate together with
/// the (Γ1, Γ2, κ) = 2π × (13, 4, 1) MHz spectroscopy parameters.
pub const DEFAULT_CONFIG: &str = "\
# resonator, qubits and couplings
omega_r    = 6.442 GHz
omega_1    = 4.5 GHz
omega_2    = 4.85 GHz
g_1        = 0.133 GHz
g_2        = 0.133 GHz
# gate drive amplitude and resonator leakage
epsilon    = 1.2 GHz
kappa      = 1 MHz
# coherence
t1_relax   = 7.3 us
t2_dephase = 500 ns
# per-gate drive settings
omega_d_rx     = 4.491 GHz
omega_d_rz     = 4.0 GHz
iswap_detuning = 1.18 GHz
# spectroscopy: dispersive pulls override the coupling-derived values
gamma_1       = 13 MHz
gamma_2       = 4 MHz
probe_epsilon = 0.05 MHz
";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Quantity {
    /// rad/ns
    Frequency(f64),
    /// ns
    Time(f64),
    Number(f64),
}

impl Quantity {
    fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut parts = text.split_whitespace();
        let number = parts.next().ok_or("missing value")?;
        let value: f64 = number
            .parse()
            .map_err(|_| format!("`{number}` is not a number"))?;
        if !value.is_finite() {
            return Err(format!("`{number}` is not finite"));
        }
        let unit = parts.next();
        if let Some(extra) = parts.next() {
            return Err(format!("unexpected trailing `{extra}`"));
        }
        Ok(match unit {
            None => Quantity::Number(value),
            Some("GHz") => Quantity::Frequency(ghz(value)),
            Some("MHz") => Quantity::Frequency(mhz(value)),
            Some("kHz") => Quantity::Frequency(mhz(value * 1e-3)),
            Some("Hz") => Quantity::Frequency(TAU * value * 1e-9),
            Some("rad/ns") => Quantity::Frequency(value),
            Some("ns") => Quantity::Time(value),
            Some("us") | Some("μs") => Quantity::Time(value * 1e3),
            Some("ms") => Quantity::Time(value * 1e6),
            Some(other) => return Err(format!("unknown unit `{other}`")),
        })
    }
}

/// Parsed key-value configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub entries: BTreeMap<String, Quantity>,
    pub source: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: n + 1, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected `key = value unit`".into()))?;
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(err(format!("invalid key `{key}`")));
            }
            let q = Quantity::parse(value.trim()).map_err(err)?;
            if entries.insert(key.to_string(), q).is_some() {
                return Err(err(format!("duplicate key `{key}`")));
            }
        }
        Ok(Self {
            entries,
            source: None,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.source = Some(path.to_path_buf());
        Ok(cfg)
    }

    pub fn builtin() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("built-in configuration parses")
    }

    /// Explicit path, else `$CQED_BELL_CONFIG`, else the built-in defaults.
    pub fn resolve(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) => Self::load(Path::new(&p)),
                None => Ok(Self::builtin()),
            },
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn frequency(&self, key: &str) -> Result<f64> {
        match self.entries.get(key) {
            Some(Quantity::Frequency(v)) => Ok(*v),
            Some(_) => Err(Error::Config(format!("`{key}` must carry a frequency unit"))),
            None => Err(Error::MissingKey(key.to_string())),
        }
    }

    pub fn frequency_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.contains(key) {
            self.frequency(key)
        } else {
            Ok(default)
        }
    }

    pub fn time(&self, key: &str) -> Result<f64> {
        match self.entries.get(key) {
            Some(Quantity::Time(v)) => Ok(*v),
            Some(_) => Err(Error::Config(format!("`{key}` must carry a time unit"))),
            None => Err(Error::MissingKey(key.to_string())),
        }
    }

    pub fn time_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.contains(key) {
            self.time(key)
        } else {
            Ok(default)
        }
    }
}

/// Drive frequencies chosen per gate type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSettings {
    /// Drive frequency for rx rotations (rad/ns).
    pub omega_d_rx: f64,
    /// Drive frequency for rz rotations (rad/ns).
    pub omega_d_rz: f64,
    /// Qubit-resonator detuning Δ during the iSWAP exchange (rad/ns).
    pub iswap_detuning: f64,
}

/// Resonator, qubit and drive parameters. Frequencies in rad/ns, times in ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceConfig {
    pub omega_r: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub g_1: f64,
    pub g_2: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub t1_relax: f64,
    pub t2_dephase: f64,
    pub drive: DriveSettings,
}

/// Coupling-to-detuning ratio at which the dispersive picture is flagged.
pub const DISPERSIVE_WARN_RATIO: f64 = 0.1;

impl DeviceConfig {
    /// ω_r, ω_1, ω_2, g = 2π × (6.442, 4.5, 4.85, 0.133) GHz, ε = 2π × 1.2 GHz,
    /// κ = 2π × 1 MHz, T1 = 7.3 μs, T2 = 500 ns.
    pub fn reference() -> Self {
        Self::from_config(&ConfigFile::builtin()).expect("built-in device is valid")
    }

    pub fn from_config(cfg: &ConfigFile) -> Result<Self> {
        let d = Self {
            omega_r: cfg.frequency("omega_r")?,
            omega_1: cfg.frequency("omega_1")?,
            omega_2: cfg.frequency("omega_2")?,
            g_1: cfg.frequency("g_1")?,
            g_2: cfg.frequency("g_2")?,
            epsilon: cfg.frequency("epsilon")?,
            kappa: cfg.frequency("kappa")?,
            t1_relax: cfg.time("t1_relax")?,
            t2_dephase: cfg.time("t2_dephase")?,
            drive: DriveSettings {
                omega_d_rx: cfg.frequency_or("omega_d_rx", ghz(4.491))?,
                omega_d_rz: cfg.frequency_or("omega_d_rz", ghz(4.0))?,
                iswap_detuning: cfg.frequency_or("iswap_detuning", ghz(1.18))?,
            },
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_r", self.omega_r),
            ("omega_1", self.omega_1),
            ("omega_2", self.omega_2),
            ("g_1", self.g_1),
            ("g_2", self.g_2),
            ("epsilon", self.epsilon),
            ("kappa", self.kappa),
            ("t1_relax", self.t1_relax),
            ("t2_dephase", self.t2_dephase),
            ("omega_d_rx", self.drive.omega_d_rx),
            ("omega_d_rz", self.drive.omega_d_rz),
            ("iswap_detuning", self.drive.iswap_detuning),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("`{name}` must be positive, got {v}")));
            }
        }
        if self.omega_1 == self.omega_r || self.omega_2 == self.omega_r {
            return Err(Error::Config("qubit resonant with the resonator".into()));
        }
        Ok(())
    }

    /// Δ_j = ω_j − ω_r.
    pub fn qubit_detuning(&self, qubit: u8) -> f64 {
        match qubit {
            1 => self.omega_1 - self.omega_r,
            _ => self.omega_2 - self.omega_r,
        }
    }

    pub fn qubit_frequency(&self, qubit: u8) -> f64 {
        if qubit == 1 {
            self.omega_1
        } else {
            self.omega_2
        }
    }

    pub fn coupling(&self, qubit: u8) -> f64 {
        if qubit == 1 {
            self.g_1
        } else {
            self.g_2
        }
    }

    /// |g_j / Δ_j| for both qubits.
    pub fn dispersive_ratios(&self) -> [f64; 2] {
        [1u8, 2].map(|q| (self.coupling(q) / self.qubit_detuning(q)).abs())
    }

    /// Dispersive pulls Γ_j = g_j² / Δ_j.
    pub fn dispersive_shifts(&self) -> [f64; 2] {
        [1u8, 2].map(|q| self.coupling(q).powi(2) / self.qubit_detuning(q))
    }

    pub fn warnings(&self) -> Vec<String> {
        self.dispersive_ratios()
            .iter()
            .enumerate()
            .filter(|(_, r)| **r >= DISPERSIVE_WARN_RATIO)
            .map(|(i, r)| {
                format!(
                    "qubit {}: |g/Δ| = {r:.3} is not small; dispersive approximation questionable",
                    i + 1
                )
            })
            .collect()
    }
}
