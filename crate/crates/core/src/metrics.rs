//! Rates, rate bounds, subarray gain, and empirical CDFs.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::allocation::Allocation;
use crate::analog::AnalogPrecoder;
use crate::channel::{subarray_response, ChannelRealization};
use crate::config::SystemConfig;
use crate::digital::{DigitalPrecoder, EffectiveLink, SubcarrierLink};
use crate::error::{Error, Result};
use crate::grid::SubcarrierGrid;

/// Per-user rates and the two rate upper bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// Bits/s/Hz summed over subcarriers.
    pub rates: Vec<f64>,
    pub min_rate: f64,
    /// Large-subarray bound, linear in the allocated subarray count.
    pub bound_asymptotic: Vec<f64>,
    /// Bound valid at any subarray size.
    pub bound_finite: Vec<f64>,
}

/// Average subarray gain at one subcarrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSample {
    /// `(1/N_RF) sum_l |u_{k,n(l),l}^H f_{k,l}|`.
    pub raw: f64,
    /// `raw * N_RF`; 1 for ideal sub-precoders.
    pub normalized: f64,
}

/// `R_n` of user `n`: per-subcarrier SINR with `rho/N` power per stream and unit
/// noise, summed as `log2(1 + SINR)` over the band.
///
/// Uses the receive-combined rows, since `||H_{k,n} F w|| = |g_{k,n} w|` for a
/// single-path channel.
pub fn achievable_rate(link: &EffectiveLink, digital: &DigitalPrecoder, snr: f64, n: usize) -> f64 {
    link.subcarriers
        .iter()
        .zip(&digital.matrices)
        .map(|(sub, w)| {
            let users = w.ncols() as f64;
            let row = sub.effective.row(n);
            let mut signal = 0.0;
            let mut interference = 0.0;
            for (j, col) in w.column_iter().enumerate() {
                let p = (row * col)[(0, 0)].norm_sqr() * snr / users;
                if j == n {
                    signal = p;
                } else {
                    interference += p;
                }
            }
            libm::log2(1.0 + signal / (interference + 1.0))
        })
        .sum()
}

fn gain_from_coupling(sub: &SubcarrierLink, owners: &[usize]) -> GainSample {
    let rf = owners.len() as f64;
    let total: f64 = owners
        .iter()
        .enumerate()
        .map(|(l, &n)| sub.coupling[(n, l)].norm())
        .sum();
    GainSample {
        raw: total / rf,
        normalized: total,
    }
}

/// Per-subarray normalized gains `N_RF |u_{k,n(l),l}^H f_{k,l}|`.
pub fn subarray_gains(sub: &SubcarrierLink, owners: &[usize]) -> Vec<f64> {
    let rf = owners.len() as f64;
    owners
        .iter()
        .enumerate()
        .map(|(l, &n)| rf * sub.coupling[(n, l)].norm())
        .collect()
}

/// Gain profile of a whole link.
pub fn gain_profile(link: &EffectiveLink, alloc: &Allocation) -> Vec<GainSample> {
    let owners = alloc.owners();
    link.subcarriers
        .iter()
        .map(|sub| gain_from_coupling(sub, &owners))
        .collect()
}

/// Average subarray gain at the 1-based subcarrier `k`, straight from the
/// subarray responses and the analog design.
pub fn average_subarray_gain(
    real: &ChannelRealization,
    analog: &AnalogPrecoder,
    grid: &SubcarrierGrid,
    alloc: &Allocation,
    k: usize,
) -> Result<GainSample> {
    let layout = analog.layout;
    let mut total = 0.0;
    for (i, &n) in alloc.owners().iter().enumerate() {
        let l = i + 1;
        let u = subarray_response(grid, real.users[n].psi, k, l, &layout)?;
        let f = analog.sub_precoder(grid, k, l)?;
        total += u.dotc(&f).norm();
    }
    Ok(GainSample {
        raw: total / layout.rf_chains as f64,
        normalized: total,
    })
}

fn bound_prefactor(cfg: &SystemConfig, omega: f64) -> f64 {
    cfg.snr * omega * (cfg.rx_antennas * cfg.tx_antennas) as f64 / (LN_2 * cfg.users as f64)
}

/// Large-subarray rate bound
/// `rho omega N_r N_t / (ln 2 N) * |S_n| / N_RF * alpha_tilde_n`.
pub fn rate_upper_bound(alpha_tilde_n: f64, count_n: usize, cfg: &SystemConfig, omega: f64) -> f64 {
    bound_prefactor(cfg, omega) * count_n as f64 / cfg.rf_chains as f64 * alpha_tilde_n
}

/// Finite-size bound `rho omega N_r N_t / (ln 2 N) * sum_k |alpha_{k,n}|^2 ||u_{k,n}^H F_k||^2`,
/// which every achievable rate respects.
pub fn finite_size_rate_bound(
    real: &ChannelRealization,
    link: &EffectiveLink,
    cfg: &SystemConfig,
    omega: f64,
    n: usize,
) -> f64 {
    let sum: f64 = link
        .subcarriers
        .iter()
        .zip(&real.users[n].gains)
        .map(|(sub, a)| a.norm_sqr() * sub.coupling.row(n).norm_squared())
        .sum();
    bound_prefactor(cfg, omega) * sum
}

/// `min_n alpha_tilde_n * counts_n`.
pub fn min_subarray_objective(alpha_tilde: &[f64], counts: &[usize]) -> f64 {
    alpha_tilde
        .iter()
        .zip(counts)
        .map(|(a, &c)| a * c as f64)
        .fold(f64::INFINITY, f64::min)
}

/// Same objective over real-valued counts.
pub fn min_weighted_objective(alpha_tilde: &[f64], counts: &[f64]) -> f64 {
    alpha_tilde
        .iter()
        .zip(counts)
        .map(|(a, c)| a * c)
        .fold(f64::INFINITY, f64::min)
}

/// All rate figures of one scheme in one trial.
pub fn rate_report(
    cfg: &SystemConfig,
    real: &ChannelRealization,
    link: &EffectiveLink,
    digital: &DigitalPrecoder,
    alpha_tilde: &[f64],
    alloc: &Allocation,
) -> RateReport {
    let users = real.user_count();
    let rates: Vec<f64> = (0..users)
        .map(|n| achievable_rate(link, digital, cfg.snr, n))
        .collect();
    let min_rate = rates.iter().copied().fold(f64::INFINITY, f64::min);
    RateReport {
        min_rate,
        bound_asymptotic: (0..users)
            .map(|n| rate_upper_bound(alpha_tilde[n], alloc.counts[n], cfg, digital.omega))
            .collect(),
        bound_finite: (0..users)
            .map(|n| finite_size_rate_bound(real, link, cfg, digital.omega, n))
            .collect(),
        rates,
    }
}

/// Sorted samples with step probabilities `i / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfSeries {
    pub values: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl CdfSeries {
    /// Empirical CDF evaluated at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let below = self.values.partition_point(|v| *v <= x);
        below as f64 / self.values.len() as f64
    }

    pub fn median(&self) -> f64 {
        let n = self.values.len();
        if n % 2 == 1 {
            self.values[n / 2]
        } else {
            0.5 * (self.values[n / 2 - 1] + self.values[n / 2])
        }
    }
}

pub fn empirical_cdf(samples: &[f64]) -> Result<CdfSeries> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut values = samples.to_vec();
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let probabilities = (1..=values.len()).map(|i| i as f64 / n).collect();
    Ok(CdfSeries {
        values,
        probabilities,
    })
}
