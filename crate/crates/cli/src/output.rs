use crate::CliResult;
use serde::Serialize;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Where command output goes: a directory, or stdout for CSV.
#[derive(Debug, Clone)]
pub struct Sink {
    dir: Option<PathBuf>,
}

pub type CsvOut = csv::Writer<Box<dyn Write>>;

impl Sink {
    pub fn new(dir: Option<&Path>) -> io::Result<Self> {
        if let Some(d) = dir {
            fs::create_dir_all(d)?;
        }
        Ok(Sink {
            dir: dir.map(Path::to_path_buf),
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Opens `<name>.csv` and writes the run record as a `#` comment line.
    ///
    /// Returns the writer and whether the caller's rows should be preceded by
    /// a header; an append to a non-empty file skips it.
    pub fn csv<R: Serialize>(
        &self,
        name: &str,
        record: &R,
        append: bool,
    ) -> CliResult<(CsvOut, bool)> {
        let (mut raw, fresh): (Box<dyn Write>, bool) = match &self.dir {
            None => (Box::new(io::stdout()), true),
            Some(d) => {
                let path = d.join(format!("{name}.csv"));
                let fresh = !append || fs::metadata(&path).map(|m| m.len() == 0).unwrap_or(true);
                let file = if append {
                    OpenOptions::new().create(true).append(true).open(&path)?
                } else {
                    File::create(&path)?
                };
                (Box::new(BufWriter::new(file)), fresh)
            }
        };
        writeln!(raw, "# {}", serde_json::to_string(record)?)?;
        let w = csv::WriterBuilder::new()
            .has_headers(fresh)
            .from_writer(raw);
        Ok((w, fresh))
    }

    /// Writes `<name>.json` when an output directory is set.
    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<Option<PathBuf>> {
        let Some(d) = &self.dir else {
            return Ok(None);
        };
        let path = d.join(format!("{name}.json"));
        write_json(&path, value)?;
        Ok(Some(path))
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}
