use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::{Common, Format};

/// Report sink: JSON to stdout, plus files under `--out` in the requested
/// formats.
pub struct Outputs {
    dir: Option<PathBuf>,
    formats: Vec<Format>,
}

impl Outputs {
    pub fn new(c: &Common) -> Result<Self> {
        if let Some(dir) = &c.out {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        Ok(Outputs {
            dir: c.out.clone(),
            formats: c.format.clone(),
        })
    }

    fn file(&self, format: Format, name: &str, ext: &str) -> Option<PathBuf> {
        let dir = self.dir.as_ref()?;
        self.formats
            .contains(&format)
            .then(|| dir.join(format!("{name}.{ext}")))
    }

    fn write(path: PathBuf, text: &str) -> Result<()> {
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    /// Prints the report and writes `<name>.json` when asked for.
    pub fn json<T: Serialize>(&self, name: &str, report: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(report)?;
        text.push('\n');
        print!("{text}");
        if let Some(path) = self.file(Format::Json, name, "json") {
            Self::write(path, &text)?;
        }
        Ok(())
    }

    /// Writes `<name>.csv` with a header row.
    pub fn csv(
        &self,
        name: &str,
        header: &[String],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<()> {
        let Some(path) = self.file(Format::Csv, name, "csv") else {
            return Ok(());
        };
        let mut w =
            csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `<name>.svg`; the document is only built when needed.
    pub fn svg(&self, name: &str, build: impl FnOnce() -> String) -> Result<()> {
        match self.file(Format::Svg, name, "svg") {
            Some(path) => Self::write(path, &build()),
            None => Ok(()),
        }
    }
}
