//! Monte Carlo campaigns on top of `subthz-core`: JSON config files, a
//! worker-pool campaign runner whose output does not depend on the pool size,
//! and the CSV files the plotting scripts read.

pub mod campaign;
pub mod config_file;
pub mod error;
pub mod output;

pub use campaign::{run_campaign, CampaignResults, CampaignSpec, GainMean, SchemeSummary};
pub use config_file::{load_config, parse_config, ConfigFile};
pub use error::SimError;
pub use output::{write_channel_dumps, write_outputs};
