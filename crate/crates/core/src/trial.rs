//! One Monte Carlo trial: a single channel draw evaluated under every requested
//! scheme, so schemes are compared on identical channels.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::allocation::{fair_allocation, sum_channel_gains, uniform_allocation, Allocation};
use crate::analog::AnalogPrecoder;
use crate::channel::{synthesize_channel, ChannelRealization};
use crate::config::SystemConfig;
use crate::digital::{DigitalPrecoder, EffectiveLink};
use crate::error::{Error, Result};
use crate::grid::{SubcarrierGrid, TtdGrid};
use crate::metrics::{
    gain_profile, min_subarray_objective, rate_report, subarray_gains, GainSample, RateReport,
};

/// Allocation and analog design pairing under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Max-min fair allocation, alternating PS/TTD design.
    ProposedAlg1,
    /// Equal split of subarrays, alternating PS/TTD design.
    UniformAlg1,
    /// Max-min fair allocation, ideal analog stage.
    ProposedIasp,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [
        Scheme::ProposedAlg1,
        Scheme::UniformAlg1,
        Scheme::ProposedIasp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::ProposedAlg1 => "proposed_alg1",
            Scheme::UniformAlg1 => "uniform_alg1",
            Scheme::ProposedIasp => "proposed_iasp",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Returned when a scheme name is not recognized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownScheme;

impl fmt::Display for UnknownScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected one of proposed_alg1, uniform_alg1, proposed_iasp")
    }
}

impl core::error::Error for UnknownScheme {}

impl FromStr for Scheme {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or(UnknownScheme)
    }
}

/// Everything one scheme produced in one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutcome {
    pub scheme: Scheme,
    pub allocation: Allocation,
    pub rates: RateReport,
    /// Per subcarrier, grid order.
    pub gain: Vec<GainSample>,
    /// Per subcarrier: mean normalized gain over the subarrays whose user has a
    /// non-negative direction, `None` when there is no such subarray.
    pub gain_nonneg: Vec<Option<f64>>,
    pub min_objective: f64,
    pub omega: f64,
    /// Fraction of TTDs pinned to the edge of the delay range.
    pub clamp_rate: f64,
    /// Subcarriers that fell back from ZF to the matched precoder.
    pub fallback_subcarriers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: u64,
    pub channel: ChannelRealization,
    pub alpha_tilde: Vec<f64>,
    /// In the order the schemes were requested.
    pub outcomes: Vec<SchemeOutcome>,
}

impl TrialResult {
    pub fn outcome(&self, scheme: Scheme) -> Option<&SchemeOutcome> {
        self.outcomes.iter().find(|o| o.scheme == scheme)
    }
}

/// Random stream of one trial. Streams are indexed by trial, so a trial's draws
/// do not depend on which other trials ran or in what order.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Draws the channel of trial `trial` and evaluates it under each scheme.
pub fn run_trial(
    cfg: &SystemConfig,
    schemes: &[Scheme],
    master_seed: u64,
    trial: u64,
) -> Result<TrialResult> {
    let grid = SubcarrierGrid::new(cfg);
    let ttd_grid = TtdGrid::from_config(cfg)?;
    let channel = synthesize_channel(cfg, &grid, &mut trial_rng(master_seed, trial))?;
    let alpha_tilde = sum_channel_gains(&channel);
    let fair = fair_allocation(&channel, cfg.rf_chains)?;

    let outcomes = schemes
        .iter()
        .map(|&scheme| {
            let (allocation, analog) = match scheme {
                Scheme::ProposedAlg1 => {
                    let analog =
                        AnalogPrecoder::alternating(cfg, &grid, &ttd_grid, &channel, &fair)?;
                    (fair.clone(), analog)
                }
                Scheme::UniformAlg1 => {
                    let uniform = uniform_allocation(cfg.users, cfg.rf_chains)?;
                    let analog =
                        AnalogPrecoder::alternating(cfg, &grid, &ttd_grid, &channel, &uniform)?;
                    (uniform, analog)
                }
                Scheme::ProposedIasp => {
                    let analog = AnalogPrecoder::ideal(cfg, &channel, &fair);
                    (fair.clone(), analog)
                }
            };
            evaluate(cfg, &channel, &alpha_tilde, scheme, allocation, &analog)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(TrialResult {
        trial,
        channel,
        alpha_tilde,
        outcomes,
    })
}

fn evaluate(
    cfg: &SystemConfig,
    channel: &ChannelRealization,
    alpha_tilde: &[f64],
    scheme: Scheme,
    allocation: Allocation,
    analog: &AnalogPrecoder,
) -> Result<SchemeOutcome> {
    let grid = SubcarrierGrid::new(cfg);
    let link = EffectiveLink::build(cfg, &grid, channel, analog)?;
    let digital = DigitalPrecoder::design(&link, &allocation, cfg.digital)?;
    let rates = rate_report(cfg, channel, &link, &digital, alpha_tilde, &allocation);
    if rates.rates.iter().any(|r| !r.is_finite()) {
        return Err(Error::DegeneratePower);
    }

    let owners = allocation.owners();
    let nonneg: Vec<usize> = owners
        .iter()
        .enumerate()
        .filter(|&(_, &n)| channel.users[n].psi >= 0.0)
        .map(|(l, _)| l)
        .collect();
    let gain_nonneg = link
        .subcarriers
        .iter()
        .map(|sub| {
            if nonneg.is_empty() {
                return None;
            }
            let per_subarray = subarray_gains(sub, &owners);
            Some(nonneg.iter().map(|&l| per_subarray[l]).sum::<f64>() / nonneg.len() as f64)
        })
        .collect();

    Ok(SchemeOutcome {
        scheme,
        gain: gain_profile(&link, &allocation),
        gain_nonneg,
        min_objective: min_subarray_objective(alpha_tilde, &allocation.counts),
        omega: digital.omega,
        clamp_rate: analog.clamp_rate(),
        fallback_subcarriers: digital.fallback_subcarriers,
        rates,
        allocation,
    })
}
