//! Persistence and ingestion: network specs with sidecar weight blobs,
//! bit-packed spike traces, IDX image files, and report emission.
//!
//! Endianness is per-format: the weight blob and spike trace are
//! little-endian, IDX follows its big-endian convention.

mod idx;
mod network;
mod report;
mod trace;

pub use idx::load_idx_images;
pub use network::{load_network, save_network};
pub use report::{write_compare_csv, write_report_csv, write_report_json, CompareRow};
pub use trace::{load_trace, save_trace};

use std::fs;
use std::path::Path;

use crate::error::Result;

/// Writes atomically: temp file in the target directory, then rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    if !dir.as_os_str().is_empty() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_os_string();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
