//! File emission shared by the commands.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// Enough to rerun a command: pass the manifest back as `--config`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub args: serde_json::Value,
    pub config: RunConfig,
    pub outputs: Vec<String>,
}

pub fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    use std::io::Write;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<command>_manifest.json` into the output directory.
pub fn write_manifest(
    cfg: &RunConfig,
    command: &str,
    args: serde_json::Value,
    outputs: &[PathBuf],
) -> anyhow::Result<PathBuf> {
    let path = cfg.out.join(format!("{command}_manifest.json"));
    let m = Manifest {
        command: command.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: cfg.seed,
        args,
        config: cfg.clone(),
        outputs: outputs
            .iter()
            .map(|p| p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned()))
            .collect(),
    };
    write_json(&path, &m)?;
    Ok(path)
}
