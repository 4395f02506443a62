//! Artifact files. Every CSV starts with a `# key=value` header block and every
//! JSON object carries the same keys:
//!
//! ```text
//! # config_hash=<sha256 hex>
//! # seed=<u64>
//! # version=<crate version>
//! x,f
//! 0,0
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting; `NA` marks a
//! missing value.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const NA: &str = "NA";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    fn header(&self) -> [(&'static str, String); 3] {
        [
            ("config_hash", self.config_hash.clone()),
            ("seed", self.seed.to_string()),
            ("version", VERSION.to_string()),
        ]
    }
}

pub fn opt(value: Option<f64>) -> String {
    value.map_or_else(|| NA.to_string(), |v| v.to_string())
}

pub fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(CliError::write(dir))
}

pub fn write_csv<I, R>(path: &Path, prov: &Provenance, columns: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let wrap = CliError::write;
    let file = File::create(path).map_err(wrap(path))?;
    let mut out = BufWriter::new(file);
    for (key, value) in prov.header() {
        writeln!(out, "# {key}={value}").map_err(wrap(path))?;
    }
    let mut writer = csv::Writer::from_writer(out);
    let to_io = |e: csv::Error| std::io::Error::other(e.to_string());
    writer.write_record(columns).map_err(|e| wrap(path)(to_io(e)))?;
    for row in rows {
        let row: Vec<String> = row.into_iter().collect();
        writer.write_record(&row).map_err(|e| wrap(path)(to_io(e)))?;
    }
    writer.flush().map_err(wrap(path))
}

pub fn write_json(path: &Path, prov: &Provenance, mut fields: Map<String, Value>) -> CliResult<()> {
    for (key, value) in prov.header() {
        let value = match key {
            "seed" => Value::from(prov.seed),
            _ => Value::from(value),
        };
        fields.insert(key.to_string(), value);
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(fields))
        .expect("JSON maps always serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(CliError::write(path))
}

/// A CSV artifact read back from disk.
#[derive(Debug, Clone)]
pub struct Table {
    pub path: PathBuf,
    pub config_hash: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> CliResult<Self> {
        let missing = |reason: String| CliError::MissingInput {
            path: path.to_path_buf(),
            reason,
        };
        let file = File::open(path).map_err(|e| missing(e.to_string()))?;
        let mut config_hash = None;
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| missing(e.to_string()))?;
            match line.strip_prefix("# ") {
                Some(kv) => {
                    if let Some(hash) = kv.strip_prefix("config_hash=") {
                        config_hash = Some(hash.to_string());
                    }
                }
                None => break,
            }
        }
        let config_hash = config_hash.ok_or_else(|| missing("no config_hash header".into()))?;
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| missing(e.to_string()))?;
        let columns = reader
            .headers()
            .map_err(|e| missing(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<_, _>>()
            .map_err(|e| missing(e.to_string()))?;
        Ok(Self {
            path: path.to_path_buf(),
            config_hash,
            columns,
            rows,
        })
    }

    /// Reads `path` and checks it was produced under `expected_hash` with the given columns.
    pub fn read_checked(path: &Path, expected_hash: &str, columns: &[&str]) -> CliResult<Self> {
        let table = Self::read(path)?;
        if table.config_hash != expected_hash {
            return Err(CliError::HashMismatch {
                path: path.to_path_buf(),
                found: table.config_hash,
                expected: expected_hash.to_string(),
            });
        }
        if table.columns != columns {
            return Err(CliError::MissingInput {
                path: path.to_path_buf(),
                reason: format!("columns {:?}, expected {columns:?}", table.columns),
            });
        }
        Ok(table)
    }

    pub fn column(&self, name: &str) -> usize {
        self.columns
            .iter()
            .position(|c| c == name)
            .expect("columns were checked on read")
    }

    pub fn parse<T: std::str::FromStr>(&self, row: usize, col: usize) -> CliResult<T> {
        let cell = &self.rows[row][col];
        cell.parse().map_err(|_| CliError::MissingInput {
            path: self.path.clone(),
            reason: format!("cannot parse {cell:?} in row {} column {}", row + 1, self.columns[col]),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = std::env::temp_dir().join(format!("prefchoice-output-{}", std::process::id()));
        create_dir(&dir).unwrap();
        let path = dir.join("t.csv");
        let prov = Provenance {
            config_hash: "abc".into(),
            seed: 7,
        };
        let rows = vec![
            vec!["0.1".to_string(), opt(Some(1.0 / 3.0))],
            vec!["0.2".to_string(), opt(None)],
        ];
        write_csv(&path, &prov, &["x", "y"], rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# config_hash=abc\n# seed=7\n# version="));
        let table = Table::read_checked(&path, "abc", &["x", "y"]).unwrap();
        assert_eq!(table.rows[0][1], "0.3333333333333333");
        assert_eq!(table.rows[1][1], NA);
        assert!(matches!(
            Table::read_checked(&path, "other", &["x", "y"]),
            Err(CliError::HashMismatch { .. })
        ));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
