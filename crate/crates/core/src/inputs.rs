//! Textual state and grid requests, as accepted on the command line.
//!
//! States: `bell:<phi-plus|phi-minus|psi-plus|psi-minus>`, `basis:<kl>`,
//! `encoded:<θ1>,<θ2>` (the prepared Bell state after R(θ1) ⊗ R(θ2)),
//! `amps:<re00>,<im00>,...,<re11>,<im11>` (normalized on input) and
//! `random:<seed>`. Grids: `<lo>:<hi>:<points>` in MHz of Δr/2π.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::bell::{encode, prepare_bell, prepare_bell_label, BellLabel};
use crate::error::{Error, Result};
use crate::quantum::{LogicState, TwoQubitState};
use crate::spectrum::DetuningGrid;
use crate::units::mhz;

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Bell(BellLabel),
    Basis(LogicState),
    Encoded(f64, f64),
    Amplitudes([Complex64; 4]),
    Random(u64),
}

fn numbers(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("`{t}` is not a number")))
        })
        .collect()
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("state `{s}` has no `kind:` prefix")))?;
        match kind {
            "bell" => Ok(StateSpec::Bell(arg.parse()?)),
            "basis" => LogicState::ALL
                .into_iter()
                .find(|b| b.label() == arg)
                .map(StateSpec::Basis)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown basis state `{arg}`"))),
            "encoded" => match numbers(arg)?[..] {
                [a, b] => Ok(StateSpec::Encoded(a, b)),
                _ => Err(Error::InvalidArgument("encoded: expects two angles".into())),
            },
            "amps" => {
                let v = numbers(arg)?;
                if v.len() != 8 {
                    return Err(Error::InvalidArgument("amps: expects 8 numbers".into()));
                }
                Ok(StateSpec::Amplitudes(std::array::from_fn(|k| {
                    Complex64::new(v[2 * k], v[2 * k + 1])
                })))
            }
            "random" => arg
                .parse()
                .map(StateSpec::Random)
                .map_err(|_| Error::InvalidArgument(format!("bad seed `{arg}`"))),
            other => Err(Error::InvalidArgument(format!("unknown state kind `{other}`"))),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Bell(l) => write!(f, "bell:{}", l.name()),
            StateSpec::Basis(b) => write!(f, "basis:{}", b.label()),
            StateSpec::Encoded(a, b) => write!(f, "encoded:{a},{b}"),
            StateSpec::Amplitudes(a) => {
                let parts: Vec<String> = a.iter().map(|z| format!("{},{}", z.re, z.im)).collect();
                write!(f, "amps:{}", parts.join(","))
            }
            StateSpec::Random(seed) => write!(f, "random:{seed}"),
        }
    }
}

impl StateSpec {
    pub fn build(&self) -> Result<TwoQubitState> {
        Ok(match self {
            StateSpec::Bell(l) => prepare_bell_label(*l),
            StateSpec::Basis(b) => TwoQubitState::basis(*b),
            StateSpec::Encoded(a, b) => encode(&prepare_bell(), *a, *b),
            StateSpec::Amplitudes(a) => TwoQubitState::normalized(*a)?,
            StateSpec::Random(seed) => TwoQubitState::random(&mut StdRng::seed_from_u64(*seed)),
        })
    }
}

/// Uniform grid request in MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo_mhz: f64,
    pub hi_mhz: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            lo_mhz: -25.0,
            hi_mhz: 25.0,
            points: 2001,
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(Error::InvalidArgument(format!("grid `{s}` is not lo:hi:points")));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("`{t}` is not a number")))
        };
        let points = n
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("`{n}` is not a point count")))?;
        let g = Self {
            lo_mhz: num(lo)?,
            hi_mhz: num(hi)?,
            points,
        };
        g.build()?;
        Ok(g)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo_mhz, self.hi_mhz, self.points)
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<DetuningGrid> {
        DetuningGrid::uniform(mhz(self.lo_mhz), mhz(self.hi_mhz), self.points)
    }
}
