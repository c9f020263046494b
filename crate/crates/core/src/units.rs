//! Unit conversions.
//!
//! Internally every frequency is an angular frequency in rad/ns and every
//! time is in ns. Ordinary frequencies (GHz, MHz, ...) are multiplied by 2π
//! at the boundary.

use std::f64::consts::TAU;

/// 2π × `f` GHz in rad/ns.
pub fn ghz(f: f64) -> f64 {
    TAU * f
}

/// 2π × `f` MHz in rad/ns.
pub fn mhz(f: f64) -> f64 {
    TAU * f * 1e-3
}

/// Inverse of [`mhz`]: the ordinary frequency in MHz of an angular frequency.
pub fn to_mhz(omega: f64) -> f64 {
    omega / (TAU * 1e-3)
}

pub fn to_ghz(omega: f64) -> f64 {
    omega / TAU
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mhz_round_trip() {
        for f in [-25.0, -17.0, 0.0, 0.025, 13.0] {
            assert!((to_mhz(mhz(f)) - f).abs() < 1e-12);
        }
        assert!((ghz(1.0) - mhz(1000.0)).abs() < 1e-12);
        assert!((to_ghz(ghz(4.491)) - 4.491).abs() < 1e-12);
    }
}
