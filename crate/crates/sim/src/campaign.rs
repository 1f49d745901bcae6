//! Seeded Monte Carlo campaigns.

use rayon::prelude::*;
use subthz_core::metrics::empirical_cdf;
use subthz_core::{run_trial, CdfSeries, Scheme, SystemConfig, TrialResult};

use crate::error::SimError;

/// Largest tolerated share of failed trials.
pub const MAX_FAILURE_RATE: f64 = 0.10;

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSpec {
    pub config: SystemConfig,
    pub trials: u64,
    pub master_seed: u64,
    pub schemes: Vec<Scheme>,
    /// Worker threads. Has no effect on results.
    pub parallelism: usize,
}

impl CampaignSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::InvalidCampaign(
                "trials must be at least 1".into(),
            ));
        }
        if self.schemes.is_empty() {
            return Err(SimError::InvalidCampaign(
                "at least one scheme is required".into(),
            ));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(SimError::InvalidCampaign(format!(
                    "scheme {s} listed twice"
                )));
            }
        }
        if self.parallelism == 0 {
            return Err(SimError::InvalidCampaign(
                "parallelism must be at least 1".into(),
            ));
        }
        self.config
            .clone()
            .validate()
            .map(|_| ())
            .map_err(SimError::InvalidConfig)
    }
}

/// Trial-averaged gain at one subcarrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainMean {
    pub raw: f64,
    pub normalized: f64,
    /// Mean over the trials that have at least one subarray serving a user with
    /// non-negative direction.
    pub normalized_nonneg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSummary {
    pub scheme: Scheme,
    pub min_rate: CdfSeries,
    pub min_objective: CdfSeries,
    /// Per subcarrier, grid order.
    pub gain: Vec<GainMean>,
}

impl SchemeSummary {
    pub fn mean_min_rate(&self) -> f64 {
        mean(&self.min_rate.values)
    }
}

#[derive(Debug, Clone)]
pub struct CampaignResults {
    pub spec: CampaignSpec,
    /// Successful trials in trial order.
    pub trials: Vec<TrialResult>,
    /// Failed trials with their error message, in trial order.
    pub failures: Vec<(u64, String)>,
    /// One entry per requested scheme, in request order.
    pub summaries: Vec<SchemeSummary>,
}

impl CampaignResults {
    pub fn summary(&self, scheme: Scheme) -> Option<&SchemeSummary> {
        self.summaries.iter().find(|s| s.scheme == scheme)
    }
}

/// Whether `failed` of `trials` is more than [`MAX_FAILURE_RATE`].
pub fn exceeds_failure_budget(failed: usize, trials: u64) -> bool {
    failed as f64 > MAX_FAILURE_RATE * trials as f64
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Runs every trial on a pool of `spec.parallelism` workers and folds the
/// results in trial order.
pub fn run_campaign(spec: &CampaignSpec) -> Result<CampaignResults, SimError> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.parallelism)
        .build()?;
    let outcomes: Vec<Result<TrialResult, SimError>> = pool.install(|| {
        (0..spec.trials)
            .into_par_iter()
            .map(|trial| {
                run_trial(&spec.config, &spec.schemes, spec.master_seed, trial)
                    .map_err(|source| SimError::Trial { trial, source })
            })
            .collect()
    });

    let mut trials = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(t) => trials.push(t),
            Err(e) => failures.push((i as u64, e.to_string())),
        }
    }
    if exceeds_failure_budget(failures.len(), spec.trials) {
        return Err(SimError::Aborted {
            failed: failures.len(),
            trials: spec.trials,
            first: failures[0].1.clone(),
        });
    }

    let summaries = spec
        .schemes
        .iter()
        .map(|&scheme| summarize(scheme, &trials, spec.config.subcarriers))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CampaignResults {
        spec: spec.clone(),
        trials,
        failures,
        summaries,
    })
}

fn summarize(
    scheme: Scheme,
    trials: &[TrialResult],
    subcarriers: usize,
) -> Result<SchemeSummary, SimError> {
    let outcomes: Vec<_> = trials.iter().filter_map(|t| t.outcome(scheme)).collect();
    let min_rates: Vec<f64> = outcomes.iter().map(|o| o.rates.min_rate).collect();
    let min_objs: Vec<f64> = outcomes.iter().map(|o| o.min_objective).collect();

    let mut raw = vec![0.0; subcarriers];
    let mut normalized = vec![0.0; subcarriers];
    let mut nonneg = vec![0.0; subcarriers];
    let mut nonneg_count = vec![0usize; subcarriers];
    for o in &outcomes {
        for (k, g) in o.gain.iter().enumerate() {
            raw[k] += g.raw;
            normalized[k] += g.normalized;
        }
        for (k, g) in o.gain_nonneg.iter().enumerate() {
            if let Some(g) = g {
                nonneg[k] += g;
                nonneg_count[k] += 1;
            }
        }
    }
    let count = outcomes.len() as f64;
    let gain = (0..subcarriers)
        .map(|k| GainMean {
            raw: raw[k] / count,
            normalized: normalized[k] / count,
            normalized_nonneg: (nonneg_count[k] > 0).then(|| nonneg[k] / nonneg_count[k] as f64),
        })
        .collect();

    let cdf = |v: &[f64]| empirical_cdf(v).map_err(|_| SimError::EmptyResults);
    Ok(SchemeSummary {
        scheme,
        min_rate: cdf(&min_rates)?,
        min_objective: cdf(&min_objs)?,
        gain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failure_budget() {
        assert!(!exceeds_failure_budget(0, 1));
        assert!(exceeds_failure_budget(1, 1));
        assert!(!exceeds_failure_budget(20, 200));
        assert!(exceeds_failure_budget(21, 200));
    }
}
