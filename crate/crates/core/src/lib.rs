//! Link-level models for multi-user wideband sub-THz OFDM with a non-overlapping
//! subarray hybrid precoder, where each RF chain drives its own block of true-time
//! delay (TTD) units and each TTD feeds a group of phase shifters (PS).
//!
//! The crate is `no_std` (it needs `alloc`) and has no IO. It covers:
//!
//! * [`config`]: system parameters and structural validation,
//! * [`grid`]: the OFDM subcarrier grid, frequency ratios, and the TTD grid,
//! * [`channel`]: single-path far-field channels and ULA response vectors,
//! * [`allocation`]: max-min fair subarray allocation and the uniform baseline,
//! * [`analog`]: per-subarray joint PS/TTD design under quantized delays,
//! * [`digital`]: zero-forcing digital precoding with power normalization,
//! * [`metrics`]: achievable rates, rate bounds, subarray gain, empirical CDFs,
//! * [`trial`]: one seeded Monte Carlo trial across the comparison schemes.
//!
//! Subcarrier indices `k` and subarray indices `l` are 1-based wherever they are
//! arguments, because both enter phase formulas directly. Users are addressed by
//! their 0-based position.
#![no_std]

extern crate alloc;

pub mod allocation;
pub mod analog;
pub mod channel;
pub mod config;
pub mod digital;
pub mod error;
pub mod grid;
pub mod metrics;
pub mod trial;

pub use allocation::Allocation;
pub use analog::{AnalogMethod, AnalogPrecoder, SubarraySolution};
pub use channel::{ArrayVector, ChannelRealization, UserPath};
pub use config::{ArrayLayout, DigitalScheme, SolverOptions, SystemConfig, UpdateOrder};
pub use digital::DigitalPrecoder;
pub use error::{Error, Result};
pub use grid::{SubcarrierGrid, TtdGrid};
pub use metrics::{CdfSeries, GainSample, RateReport};
pub use trial::{run_trial, Scheme, SchemeOutcome, TrialResult};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
