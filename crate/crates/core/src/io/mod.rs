//! File formats: configuration, snapshots, ledgers and heatmaps.

pub mod config;
pub mod heatmap;
pub mod ledger;
pub mod snapshot;

pub use config::{parse_config, serialize_config, SimConfig};
pub use heatmap::{render_heatmap, Palette};
pub use ledger::write_ledger;
pub use snapshot::{read_snapshot, write_snapshot};
