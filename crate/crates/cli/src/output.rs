use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use linkdens_core::report::Ccdf;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Files written into one output directory, in write order.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    fn open(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.path(name);
        let file = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_owned());
        Ok(BufWriter::new(file))
    }

    /// Writes a CSV file from a header and rows of already formatted fields.
    pub fn csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let mut w = csv::Writer::from_writer(self.open(name)?);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush().with_context(|| format!("writing {name}"))?;
        Ok(())
    }

    pub fn ccdf(&mut self, name: &str, ccdf: Option<&Ccdf>) -> Result<()> {
        let points = ccdf.map_or(&[][..], |c| &c.points[..]);
        self.csv(
            name,
            &["value", "count_ge", "fraction"],
            points
                .iter()
                .map(|p| [num(p.value), p.count_ge.to_string(), num(p.fraction)]),
        )
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut w = self.open(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush().with_context(|| format!("writing {name}"))?;
        Ok(())
    }

    /// Hands the raw writer to a callback, e.g. for message tables.
    pub fn with_writer<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<()>,
    {
        let mut w = self.open(name)?;
        f(&mut w)?;
        w.flush().with_context(|| format!("writing {name}"))?;
        Ok(())
    }
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Input file bytes and their hash.
pub fn read_input(path: &Path) -> Result<(Vec<u8>, String)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let hash = sha256_hex(&bytes);
    Ok((bytes, hash))
}
