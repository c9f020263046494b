//! Simulation of a two-qubit circuit-QED Bell test read out by joint
//! spectral measurement.
//!
//! The pipeline is
//! [`bell::prepare_bell`] → [`bell::encode`] → a [`spectrum`] engine →
//! [`readout`] → [`chsh`]. [`schedule`] estimates the pulse durations of the
//! same protocol against the qubit dephasing time.
//!
//! Frequencies and rates are angular, in rad/ns; [`units`] converts from
//! GHz and MHz. Times are in ns.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod chsh;
pub mod config;
pub mod error;
pub mod inputs;
pub mod manifest;
pub mod quantum;
pub mod readout;
pub mod schedule;
pub mod spectrum;
pub mod units;

pub use error::{Error, Result};
