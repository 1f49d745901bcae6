//! Campaign CSV and manifest files.
//!
//! Floats are written in their shortest round-trip form, so re-reading a file
//! recovers every value bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use subthz_core::analog::{optimize_subarray_traced, TraceRow};
use subthz_core::channel::synthesize_channel;
use subthz_core::trial::trial_rng;
use subthz_core::{allocation, SubcarrierGrid, SystemConfig, TrialResult, TtdGrid};

use crate::campaign::CampaignResults;
use crate::config_file::ConfigFile;
use crate::error::SimError;

pub const ALLOCATION_FILE: &str = "allocation.csv";
pub const RATES_FILE: &str = "rates.csv";
pub const GAIN_FILE: &str = "gain.csv";
pub const CDF_MIN_RATE_FILE: &str = "cdf_minrate.csv";
pub const CDF_MIN_OBJECTIVE_FILE: &str = "cdf_minobj.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const CHANNEL_DIR: &str = "channels";
pub const TRACE_FILE: &str = "trace.csv";

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

struct Table {
    path: PathBuf,
    writer: csv::Writer<fs::File>,
}

impl Table {
    fn create(path: PathBuf, header: &[&str]) -> Result<Self, SimError> {
        let writer = csv::Writer::from_path(&path).map_err(|source| SimError::Csv {
            path: path.clone(),
            source,
        })?;
        let mut table = Self { path, writer };
        table.row(header)?;
        Ok(table)
    }

    fn row<I, T>(&mut self, fields: I) -> Result<(), SimError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.writer
            .write_record(fields)
            .map_err(|source| SimError::Csv {
                path: self.path.clone(),
                source,
            })
    }

    fn finish(mut self) -> Result<(), SimError> {
        self.writer.flush().map_err(|source| SimError::Io {
            path: self.path,
            source,
        })
    }
}

#[derive(Serialize)]
struct FailedTrial<'a> {
    trial: u64,
    error: &'a str,
}

#[derive(Serialize)]
struct Manifest<'a> {
    code_version: &'static str,
    master_seed: u64,
    trials: u64,
    schemes: Vec<&'static str>,
    failed_trials: Vec<FailedTrial<'a>>,
    config: ConfigFile,
}

fn create_dir(dir: &Path) -> Result<(), SimError> {
    fs::create_dir_all(dir).map_err(|source| SimError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Writes the allocation, rate, gain, CDF, diagnostics and manifest files.
pub fn write_outputs(results: &CampaignResults, dir: &Path) -> Result<(), SimError> {
    if results.trials.is_empty() {
        return Err(SimError::EmptyResults);
    }
    create_dir(dir)?;

    let mut alloc = Table::create(
        dir.join(ALLOCATION_FILE),
        &[
            "trial",
            "scheme",
            "user",
            "alpha_tilde",
            "s_count",
            "min_objective",
        ],
    )?;
    let mut rates = Table::create(
        dir.join(RATES_FILE),
        &[
            "trial",
            "scheme",
            "user",
            "rate",
            "min_rate",
            "bound_lemma1",
            "bound_finite",
        ],
    )?;
    let mut diag = Table::create(
        dir.join(DIAGNOSTICS_FILE),
        &[
            "trial",
            "scheme",
            "omega",
            "clamp_rate",
            "fallback_subcarriers",
            "fallback_used",
        ],
    )?;
    for t in &results.trials {
        let trial = t.trial.to_string();
        for o in &t.outcomes {
            let scheme = o.scheme.name();
            for (n, a) in t.alpha_tilde.iter().enumerate() {
                let user = n.to_string();
                alloc.row([
                    trial.as_str(),
                    scheme,
                    &user,
                    &fmt_f64(*a),
                    &o.allocation.counts[n].to_string(),
                    &fmt_f64(o.min_objective),
                ])?;
                rates.row([
                    trial.as_str(),
                    scheme,
                    &user,
                    &fmt_f64(o.rates.rates[n]),
                    &fmt_f64(o.rates.min_rate),
                    &fmt_f64(o.rates.bound_asymptotic[n]),
                    &fmt_f64(o.rates.bound_finite[n]),
                ])?;
            }
            diag.row([
                trial.as_str(),
                scheme,
                &fmt_f64(o.omega),
                &fmt_f64(o.clamp_rate),
                &o.fallback_subcarriers.to_string(),
                if o.fallback_subcarriers > 0 {
                    "true"
                } else {
                    "false"
                },
            ])?;
        }
    }
    alloc.finish()?;
    rates.finish()?;
    diag.finish()?;

    let grid = SubcarrierGrid::new(&results.spec.config);
    let mut gain = Table::create(
        dir.join(GAIN_FILE),
        &[
            "scheme",
            "k",
            "f_hz",
            "raw_gain_mean",
            "normalized_gain_mean",
            "normalized_gain_nonneg_mean",
        ],
    )?;
    let mut cdf_rate = Table::create(dir.join(CDF_MIN_RATE_FILE), &["scheme", "value", "prob"])?;
    let mut cdf_obj = Table::create(
        dir.join(CDF_MIN_OBJECTIVE_FILE),
        &["scheme", "value", "prob"],
    )?;
    for s in &results.summaries {
        let scheme = s.scheme.name();
        for (i, g) in s.gain.iter().enumerate() {
            gain.row([
                scheme,
                &(i + 1).to_string(),
                &fmt_f64(grid.freqs()[i]),
                &fmt_f64(g.raw),
                &fmt_f64(g.normalized),
                &g.normalized_nonneg.map(fmt_f64).unwrap_or_default(),
            ])?;
        }
        for (table, cdf) in [
            (&mut cdf_rate, &s.min_rate),
            (&mut cdf_obj, &s.min_objective),
        ] {
            for (v, p) in cdf.values.iter().zip(&cdf.probabilities) {
                table.row([scheme, &fmt_f64(*v), &fmt_f64(*p)])?;
            }
        }
    }
    gain.finish()?;
    cdf_rate.finish()?;
    cdf_obj.finish()?;

    let spec = &results.spec;
    let manifest = Manifest {
        code_version: env!("CARGO_PKG_VERSION"),
        master_seed: spec.master_seed,
        trials: spec.trials,
        schemes: spec.schemes.iter().map(|s| s.name()).collect(),
        failed_trials: results
            .failures
            .iter()
            .map(|(trial, error)| FailedTrial {
                trial: *trial,
                error,
            })
            .collect(),
        config: ConfigFile::from_config(&spec.config),
    };
    let path = dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|source| SimError::Io { path, source })
}

/// Writes `channels/trial_NNNNN.csv` for every trial: one row per user and
/// subcarrier with the path coefficient's real and imaginary parts.
pub fn write_channel_dumps(trials: &[TrialResult], dir: &Path) -> Result<(), SimError> {
    let dir = dir.join(CHANNEL_DIR);
    create_dir(&dir)?;
    for t in trials {
        let mut table = Table::create(
            dir.join(format!("trial_{:05}.csv", t.trial)),
            &["user", "psi", "phi", "tau_s", "k", "re_alpha", "im_alpha"],
        )?;
        for (n, u) in t.channel.users.iter().enumerate() {
            let (user, psi, phi, tau) = (
                n.to_string(),
                fmt_f64(u.psi),
                fmt_f64(u.phi),
                fmt_f64(u.delay_s),
            );
            for (i, a) in u.gains.iter().enumerate() {
                table.row([
                    user.as_str(),
                    &psi,
                    &phi,
                    &tau,
                    &(i + 1).to_string(),
                    &fmt_f64(a.re),
                    &fmt_f64(a.im),
                ])?;
            }
        }
        table.finish()?;
    }
    Ok(())
}

/// Solver trace of every subarray under the fair allocation of one trial.
pub fn solver_trace(
    cfg: &SystemConfig,
    master_seed: u64,
    trial: u64,
) -> Result<Vec<TraceRow>, SimError> {
    let wrap = |source| SimError::Trial { trial, source };
    let grid = SubcarrierGrid::new(cfg);
    let ttd = TtdGrid::from_config(cfg).map_err(wrap)?;
    let channel =
        synthesize_channel(cfg, &grid, &mut trial_rng(master_seed, trial)).map_err(wrap)?;
    let fair = allocation::fair_allocation(&channel, cfg.rf_chains).map_err(wrap)?;
    let mut rows = Vec::new();
    for (i, n) in fair.owners().into_iter().enumerate() {
        optimize_subarray_traced(&grid, channel.users[n].psi, i + 1, &ttd, cfg, &mut rows)
            .map_err(wrap)?;
    }
    Ok(rows)
}

pub fn write_trace(rows: &[TraceRow], dir: &Path) -> Result<(), SimError> {
    create_dir(dir)?;
    let mut table = Table::create(
        dir.join(TRACE_FILE),
        &["l", "m", "iteration", "t_seconds", "nmse"],
    )?;
    for r in rows {
        table.row([
            r.l.to_string(),
            r.m.to_string(),
            r.iteration.to_string(),
            fmt_f64(r.t_seconds),
            fmt_f64(r.nmse),
        ])?;
    }
    table.finish()
}
