//! System parameters.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Which iterate the phase-shifter update reads inside the alternating loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateOrder {
    /// Phases are recomputed from the delay quantized in the same iteration.
    #[default]
    GaussSeidel,
    /// Phases are recomputed from the previous iteration's delay.
    Jacobi,
}

/// Digital precoder applied on top of the analog stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DigitalScheme {
    /// Zero-forcing with every user column rescaled to the same power before the
    /// common power normalization. Interference stays nulled; each stream gets
    /// an equal share of the transmit power.
    #[default]
    ZfEqualPower,
    /// Zero-forcing with a single scalar normalization, so every user sees the
    /// same effective gain.
    ZfCommonScale,
}

/// Options of the alternating PS/TTD solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Upper bound on alternating iterations per TTD.
    pub max_iterations: usize,
    /// NMSE threshold of the stop rule.
    pub nmse_threshold: f64,
    /// Snap every delay onto the TTD grid. Disabling this gives the
    /// continuous-delay solver.
    pub quantize_delays: bool,
    pub update_order: UpdateOrder,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            nmse_threshold: 0.01,
            quantize_delays: true,
            update_order: UpdateOrder::GaussSeidel,
        }
    }
}

/// Shape of the transmit array: `tx_antennas = rf_chains * ttds * phase_shifters`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrayLayout {
    pub tx_antennas: usize,
    pub rf_chains: usize,
    /// TTDs per RF chain.
    pub ttds: usize,
    /// Phase shifters per TTD.
    pub phase_shifters: usize,
}

impl ArrayLayout {
    /// Antennas per subarray.
    pub fn subarray_len(&self) -> usize {
        self.ttds * self.phase_shifters
    }

    pub(crate) fn check_subarray(&self, l: usize) -> Result<()> {
        if l == 0 || l > self.rf_chains {
            return Err(Error::IndexOutOfRange {
                what: "subarray",
                index: l,
                len: self.rf_chains,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub carrier_frequency_hz: f64,
    pub bandwidth_hz: f64,
    /// Number of OFDM subcarriers; odd so that one sits on the carrier.
    pub subcarriers: usize,
    pub users: usize,
    pub rf_chains: usize,
    pub ttds_per_rf_chain: usize,
    pub phase_shifters_per_ttd: usize,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    /// Transmit SNR, linear scale.
    pub snr: f64,
    pub ttd_levels: usize,
    pub ttd_step_s: f64,
    pub distances_m: Vec<f64>,
    /// Medium power absorption coefficient, 1/m.
    pub absorption_per_m: f64,
    pub solver: SolverOptions,
    pub digital: DigitalScheme,
}

/// Converts an SNR in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

impl SystemConfig {
    /// Full-size parameter set: 1024 antennas in 16 subarrays, 1025 subcarriers,
    /// four users at 10, 15, 20 and 25 m.
    pub fn paper_scale() -> Self {
        Self {
            carrier_frequency_hz: 300e9,
            bandwidth_hz: 30e9,
            subcarriers: 1025,
            users: 4,
            rf_chains: 16,
            ttds_per_rf_chain: 16,
            phase_shifters_per_ttd: 4,
            tx_antennas: 1024,
            rx_antennas: 4,
            snr: db_to_linear(10.0),
            ttd_levels: 400,
            ttd_step_s: 4e-12,
            distances_m: vec![10.0, 15.0, 20.0, 25.0],
            absorption_per_m: 0.0033,
            solver: SolverOptions::default(),
            digital: DigitalScheme::default(),
        }
    }

    /// Reduced parameter set that runs a few hundred trials in seconds.
    pub fn desk_scale() -> Self {
        Self {
            subcarriers: 129,
            users: 2,
            rf_chains: 8,
            ttds_per_rf_chain: 8,
            phase_shifters_per_ttd: 4,
            tx_antennas: 256,
            rx_antennas: 2,
            distances_m: vec![10.0, 20.0],
            ..Self::paper_scale()
        }
    }

    pub fn layout(&self) -> ArrayLayout {
        ArrayLayout {
            tx_antennas: self.tx_antennas,
            rf_chains: self.rf_chains,
            ttds: self.ttds_per_rf_chain,
            phase_shifters: self.phase_shifters_per_ttd,
        }
    }

    /// Largest delay the TTD grid can realize, seconds.
    pub fn max_delay_s(&self) -> f64 {
        (self.ttd_levels.saturating_sub(1)) as f64 * self.ttd_step_s
    }

    /// Checks every structural and domain constraint and hands the config back.
    pub fn validate(self) -> Result<Self> {
        positive("carrier_frequency_hz", self.carrier_frequency_hz)?;
        positive("bandwidth_hz", self.bandwidth_hz)?;
        positive("snr", self.snr)?;
        positive("ttd_step_s", self.ttd_step_s)?;
        positive("nmse_threshold", self.solver.nmse_threshold)?;
        non_negative("absorption_per_m", self.absorption_per_m)?;
        for (name, count) in [
            ("subcarriers", self.subcarriers),
            ("users", self.users),
            ("rf_chains", self.rf_chains),
            ("ttds_per_rf_chain", self.ttds_per_rf_chain),
            ("phase_shifters_per_ttd", self.phase_shifters_per_ttd),
            ("tx_antennas", self.tx_antennas),
            ("rx_antennas", self.rx_antennas),
            ("ttd_levels", self.ttd_levels),
            ("max_iterations", self.solver.max_iterations),
        ] {
            if count == 0 {
                return Err(Error::Domain { name, value: 0.0 });
            }
        }
        if self.subcarriers.is_multiple_of(2) {
            return Err(Error::EvenSubcarrierCount(self.subcarriers));
        }
        let layout = self.layout();
        if layout.rf_chains * layout.subarray_len() != self.tx_antennas {
            return Err(Error::DimensionMismatch {
                tx_antennas: self.tx_antennas,
                rf_chains: self.rf_chains,
                ttds: self.ttds_per_rf_chain,
                phase_shifters: self.phase_shifters_per_ttd,
            });
        }
        if self.users > self.rf_chains {
            return Err(Error::Infeasible {
                users: self.users,
                subarrays: self.rf_chains,
            });
        }
        if self.distances_m.len() != self.users {
            return Err(Error::DistanceCount {
                expected: self.users,
                got: self.distances_m.len(),
            });
        }
        for &d in &self.distances_m {
            positive("distance_m", d)?;
        }
        Ok(self)
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { name, value })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { name, value })
    }
}
