use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

/// One exported cipher image; `path` is relative to the export directory.
#[derive(Debug, Clone, Serialize)]
pub struct DatasetEntry {
    pub path: String,
    pub label: String,
    pub width: usize,
    pub height: usize,
    pub qf: u8,
}

pub fn write_dataset(path: &Path, entries: &[DatasetEntry]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    if entries.is_empty() {
        w.write_record(["path", "label", "width", "height", "qf"])?;
    }
    for e in entries {
        w.serialize(e)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct KeyBits {
    pub component: &'static str,
    pub selection: u64,
    pub blocks: u64,
    pub permutation: u64,
}

/// Sidecar written next to an encrypted file. Holds bit counts only,
/// never key bits.
#[derive(Debug, Serialize)]
pub struct EncryptManifest {
    pub width: usize,
    pub height: usize,
    pub qf: u8,
    pub bytes: usize,
    pub bpp: f64,
    pub key_bits: Vec<KeyBits>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    crate::io::write_bytes(path, format!("{text}\n").as_bytes())
}
