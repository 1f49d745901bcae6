//! JSON config files.
//!
//! Every field is spelled out and carries its unit in the name. The SNR is given
//! in dB and converted to linear scale on load.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use subthz_core::config::db_to_linear;
use subthz_core::{DigitalScheme, SolverOptions, SystemConfig, UpdateOrder};

use crate::error::SimError;

/// Desk-scale preset shipped with the crate.
pub const DESK_PRESET: &str = include_str!("../presets/desk.json");
/// Full-size preset shipped with the crate.
pub const PAPER_PRESET: &str = include_str!("../presets/paper.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateOrderName {
    GaussSeidel,
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DigitalSchemeName {
    ZfEqualPower,
    ZfCommonScale,
}

impl From<UpdateOrderName> for UpdateOrder {
    fn from(v: UpdateOrderName) -> Self {
        match v {
            UpdateOrderName::GaussSeidel => UpdateOrder::GaussSeidel,
            UpdateOrderName::Jacobi => UpdateOrder::Jacobi,
        }
    }
}

impl From<UpdateOrder> for UpdateOrderName {
    fn from(v: UpdateOrder) -> Self {
        match v {
            UpdateOrder::GaussSeidel => UpdateOrderName::GaussSeidel,
            UpdateOrder::Jacobi => UpdateOrderName::Jacobi,
        }
    }
}

impl From<DigitalSchemeName> for DigitalScheme {
    fn from(v: DigitalSchemeName) -> Self {
        match v {
            DigitalSchemeName::ZfEqualPower => DigitalScheme::ZfEqualPower,
            DigitalSchemeName::ZfCommonScale => DigitalScheme::ZfCommonScale,
        }
    }
}

impl From<DigitalScheme> for DigitalSchemeName {
    fn from(v: DigitalScheme) -> Self {
        match v {
            DigitalScheme::ZfEqualPower => DigitalSchemeName::ZfEqualPower,
            DigitalScheme::ZfCommonScale => DigitalSchemeName::ZfCommonScale,
        }
    }
}

/// On-disk form of [`SystemConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub carrier_frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub subcarrier_count: usize,
    pub user_count: usize,
    pub rf_chain_count: usize,
    pub ttds_per_rf_chain: usize,
    pub phase_shifters_per_ttd: usize,
    pub transmit_antennas: usize,
    pub receive_antennas: usize,
    pub transmit_snr_db: f64,
    pub ttd_quantization_levels: usize,
    pub ttd_step_s: f64,
    pub max_iterations: usize,
    pub nmse_threshold: f64,
    pub user_distances_m: Vec<f64>,
    pub absorption_coefficient_per_m: f64,
    #[serde(default = "default_true")]
    pub quantize_delays: bool,
    #[serde(default = "default_update_order")]
    pub update_order: UpdateOrderName,
    #[serde(default = "default_digital")]
    pub digital_precoder: DigitalSchemeName,
}

fn default_true() -> bool {
    true
}

fn default_update_order() -> UpdateOrderName {
    UpdateOrder::default().into()
}

fn default_digital() -> DigitalSchemeName {
    DigitalScheme::default().into()
}

impl ConfigFile {
    /// Converts and validates.
    pub fn into_config(self) -> Result<SystemConfig, SimError> {
        SystemConfig {
            carrier_frequency_hz: self.carrier_frequency_hz,
            bandwidth_hz: self.bandwidth_hz,
            subcarriers: self.subcarrier_count,
            users: self.user_count,
            rf_chains: self.rf_chain_count,
            ttds_per_rf_chain: self.ttds_per_rf_chain,
            phase_shifters_per_ttd: self.phase_shifters_per_ttd,
            tx_antennas: self.transmit_antennas,
            rx_antennas: self.receive_antennas,
            snr: db_to_linear(self.transmit_snr_db),
            ttd_levels: self.ttd_quantization_levels,
            ttd_step_s: self.ttd_step_s,
            distances_m: self.user_distances_m,
            absorption_per_m: self.absorption_coefficient_per_m,
            solver: SolverOptions {
                max_iterations: self.max_iterations,
                nmse_threshold: self.nmse_threshold,
                quantize_delays: self.quantize_delays,
                update_order: self.update_order.into(),
            },
            digital: self.digital_precoder.into(),
        }
        .validate()
        .map_err(SimError::InvalidConfig)
    }

    /// Inverse of [`ConfigFile::into_config`]; the SNR is written back in dB.
    pub fn from_config(cfg: &SystemConfig) -> Self {
        Self {
            carrier_frequency_hz: cfg.carrier_frequency_hz,
            bandwidth_hz: cfg.bandwidth_hz,
            subcarrier_count: cfg.subcarriers,
            user_count: cfg.users,
            rf_chain_count: cfg.rf_chains,
            ttds_per_rf_chain: cfg.ttds_per_rf_chain,
            phase_shifters_per_ttd: cfg.phase_shifters_per_ttd,
            transmit_antennas: cfg.tx_antennas,
            receive_antennas: cfg.rx_antennas,
            transmit_snr_db: 10.0 * cfg.snr.log10(),
            ttd_quantization_levels: cfg.ttd_levels,
            ttd_step_s: cfg.ttd_step_s,
            max_iterations: cfg.solver.max_iterations,
            nmse_threshold: cfg.solver.nmse_threshold,
            user_distances_m: cfg.distances_m.clone(),
            absorption_coefficient_per_m: cfg.absorption_per_m,
            quantize_delays: cfg.solver.quantize_delays,
            update_order: cfg.solver.update_order.into(),
            digital_precoder: cfg.digital.into(),
        }
    }
}

pub fn parse_config(text: &str) -> Result<SystemConfig, SimError> {
    let file: ConfigFile = serde_json::from_str(text).map_err(SimError::ConfigSyntax)?;
    file.into_config()
}

pub fn load_config(path: &Path) -> Result<SystemConfig, SimError> {
    let text = fs::read_to_string(path).map_err(|source| SimError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_constructors() {
        assert_eq!(
            parse_config(DESK_PRESET).unwrap(),
            SystemConfig::desk_scale()
        );
        assert_eq!(
            parse_config(PAPER_PRESET).unwrap(),
            SystemConfig::paper_scale()
        );
    }

    #[test]
    fn round_trip() {
        let cfg = SystemConfig::desk_scale();
        let text = serde_json::to_string(&ConfigFile::from_config(&cfg)).unwrap();
        assert_eq!(parse_config(&text).unwrap(), cfg);
    }

    #[test]
    fn optional_fields() {
        let mut v: serde_json::Value = serde_json::from_str(DESK_PRESET).unwrap();
        let obj = v.as_object_mut().unwrap();
        obj.remove("quantize_delays");
        obj.remove("update_order");
        obj.remove("digital_precoder");
        assert_eq!(
            parse_config(&v.to_string()).unwrap(),
            SystemConfig::desk_scale()
        );

        v["update_order"] = "jacobi".into();
        v["digital_precoder"] = "zf_common_scale".into();
        let cfg = parse_config(&v.to_string()).unwrap();
        assert_eq!(cfg.solver.update_order, UpdateOrder::Jacobi);
        assert_eq!(cfg.digital, DigitalScheme::ZfCommonScale);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        let mut v: serde_json::Value = serde_json::from_str(DESK_PRESET).unwrap();
        v["rho"] = 3.into();
        assert!(matches!(
            parse_config(&v.to_string()),
            Err(SimError::ConfigSyntax(_))
        ));

        let mut v: serde_json::Value = serde_json::from_str(DESK_PRESET).unwrap();
        v["subcarrier_count"] = 128.into();
        assert!(matches!(
            parse_config(&v.to_string()),
            Err(SimError::InvalidConfig(_))
        ));
    }
}
