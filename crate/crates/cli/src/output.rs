//! Atomic file output into a run directory.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use dispersive_core::{io, Field};

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(OutDir { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes to a temporary file in the same directory, then renames it into place.
    pub fn write_bytes(&self, name: &str, bytes: &[u8]) -> Result<()> {
        let target = self.path(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root).with_context(|| format!("staging {}", target.display()))?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(&target).with_context(|| format!("writing {}", target.display()))?;
        Ok(())
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<()> {
        self.write_bytes(name, text.as_bytes())
    }

    /// Pretty JSON `{"command", "config", "result"}` with a trailing newline.
    pub fn write_json<C: Serialize, R: Serialize>(&self, name: &str, command: &str, config: &C, result: &R) -> Result<()> {
        let doc = envelope(command, config, result)?;
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.write_text(name, &text)
    }

    pub fn write_field(&self, name: &str, f: &Field) -> Result<()> {
        let bytes = io::to_bytes(f, Path::new(name))?;
        self.write_bytes(name, &bytes)
    }
}

pub fn envelope<C: Serialize, R: Serialize>(command: &str, config: &C, result: &R) -> Result<Value> {
    Ok(serde_json::json!({
        "command": command,
        "config": serde_json::to_value(config)?,
        "result": serde_json::to_value(result)?,
    }))
}
