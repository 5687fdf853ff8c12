//! Artifact directory with a checksummed manifest.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const RUN_CONFIG_FILE: &str = "run.cfg";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Files are rendered in memory, hashed, then written in one go.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_owned(), entries: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn write_with<F>(&mut self, name: &str, render: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> io::Result<()>,
    {
        let mut buf = Vec::new();
        render(&mut buf).map_err(|e| CliError::io(self.root.join(name), e))?;
        let path = self.root.join(name);
        fs::write(&path, &buf).map_err(|e| CliError::io(&path, e))?;
        log::debug!("wrote {} ({} bytes)", path.display(), buf.len());
        self.entries.push(ManifestEntry {
            file: name.to_owned(),
            sha256: hex::encode(Sha256::digest(&buf)),
            bytes: buf.len() as u64,
        });
        Ok(())
    }

    /// Writes `manifest.csv` listing every file written so far.
    pub fn finish(self) -> Result<Vec<ManifestEntry>> {
        let mut buf = Vec::new();
        write_manifest(&self.entries, &mut buf).map_err(|e| CliError::io(&self.root, e))?;
        let path = self.root.join(MANIFEST_FILE);
        fs::write(&path, &buf).map_err(|e| CliError::io(&path, e))?;
        Ok(self.entries)
    }
}

fn write_manifest<W: Write>(entries: &[ManifestEntry], mut out: W) -> io::Result<()> {
    writeln!(out, "file,sha256,bytes")?;
    for e in entries {
        writeln!(out, "{},{},{}", e.file, e.sha256, e.bytes)?;
    }
    Ok(())
}
