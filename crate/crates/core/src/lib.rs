//! Delay-Doppler waveform laboratory for joint satellite communication and
//! SAR remote sensing.
//!
//! The crate simulates an ODDM (orthogonal delay-Doppler division
//! multiplexing) downlink whose pilot signals double as radar probe pulses:
//! the same received frame feeds a unified DD-domain channel sensing stage
//! whose output drives both low-complexity MMSE equalization for
//! communication and IRCI-free range reconstruction for stripmap SAR
//! imaging. OFDM, LFM matched filtering and PN-sequence sensing are kept as
//! baselines, and a seeded Monte Carlo harness ties everything together.

pub mod channel;
pub mod coding;
pub mod config;
pub mod equalizer;
pub mod error;
pub mod fft;
pub mod grid;
pub mod harness;
pub mod io;
pub mod pulse;
pub mod qam;
pub mod sar;
pub mod sensing;
pub mod waveform;

pub use error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
