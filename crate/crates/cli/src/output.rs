//! Deterministic artifact emission: CSV files and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub struct OutputDir {
    pub dir: PathBuf,
}

impl OutputDir {
    pub fn create(dir: &Path) -> std::io::Result<OutputDir> {
        fs::create_dir_all(dir)?;
        Ok(OutputDir { dir: dir.to_path_buf() })
    }

    pub fn write_csv(&self, name: &str, header: &str, rows: &[String]) -> std::io::Result<()> {
        let mut buf = String::with_capacity(rows.len() * 32 + header.len() + 1);
        buf.push_str(header);
        buf.push('\n');
        for row in rows {
            buf.push_str(row);
            buf.push('\n');
        }
        fs::write(self.dir.join(name), buf)
    }

    /// Manifest: the fully resolved config, the toolkit version, and a hash
    /// of the config alone (worker count never enters the manifest, so the
    /// bytes are identical across worker counts).
    pub fn write_manifest(&self, subcommand: &str, config: &RunConfig) -> std::io::Result<()> {
        let config_text =
            toml::to_string_pretty(config).expect("resolved config serializes");
        let mut hasher = Sha256::new();
        hasher.update(config_text.as_bytes());
        let digest = hex::encode(hasher.finalize());
        let mut out = fs::File::create(self.dir.join("manifest.toml"))?;
        writeln!(out, "subcommand = {subcommand:?}")?;
        writeln!(out, "toolkit_version = {:?}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "config_sha256 = {digest:?}")?;
        writeln!(out)?;
        writeln!(out, "[config]")?;
        // Nest the resolved config under one table by indenting its keys.
        let nested: toml::Value =
            toml::from_str(&config_text).expect("round-trips through toml");
        let mut tbl = toml::map::Map::new();
        tbl.insert("config".to_string(), nested);
        let body = toml::to_string_pretty(&toml::Value::Table(tbl))
            .expect("nested config serializes");
        let body = body.strip_prefix("[config]\n").unwrap_or(&body);
        write!(out, "{body}")?;
        Ok(())
    }
}

/// Shortest round-trip float formatting, the single formatter used in every
/// CSV so identical runs emit identical bytes.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x}")
    }
}
