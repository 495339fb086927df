//! CSV reports: comment line, header, rows; written atomically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const TOOL: &str = concat!("weylsys ", env!("CARGO_PKG_VERSION"));

/// Floats with 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, header: &[&'static str]) -> Self {
        Table {
            name,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, config_hash: &str) -> std::io::Result<Vec<u8>> {
        let mut buf = format!("# config_hash={config_hash}, tool={TOOL}\n").into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Ok(buf)
    }

    /// Write `dir/name` through a temporary file and a rename.
    pub fn write(&self, dir: &Path, config_hash: &str) -> std::io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(self.name);
        let tmp = dir.join(format!(".{}.tmp", self.name));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&self.render(config_hash)?)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }
}
