//! Self-describing CSV tables and atomic artifact writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// A CSV table with a `#`-prefixed key=value header block.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: vec![("version".into(), env!("CARGO_PKG_VERSION").into())],
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.header.push((key.to_string(), value.to_string()));
        self
    }

    pub fn meta_all<I: IntoIterator<Item = (String, String)>>(&mut self, kv: I) -> &mut Self {
        self.header.extend(kv);
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|v| num(*v)).collect());
    }

    pub fn render(&self) -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        for (k, v) in &self.header {
            writeln!(buf, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }
}

/// Shortest round-trip decimal form.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Where tables go: stdout, or one file per table in a directory.
#[derive(Debug, Clone)]
pub enum Sink {
    Stdout,
    Dir(PathBuf),
}

impl Sink {
    pub fn emit(&self, tables: &[Table]) -> Result<Vec<PathBuf>, CliError> {
        match self {
            Sink::Stdout => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                for (i, t) in tables.iter().enumerate() {
                    if i > 0 {
                        writeln!(lock)?;
                    }
                    lock.write_all(&t.render()?)?;
                }
                Ok(Vec::new())
            }
            Sink::Dir(dir) => tables.iter().map(|t| write_atomic(dir, t)).collect(),
        }
    }
}

/// Writes `<dir>/<name>.csv` through a temporary file in the same directory.
pub fn write_atomic(dir: &Path, table: &Table) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(format!("{}.csv", table.name));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::Config(format!("cannot write in {}: {e}", dir.display())))?;
    tmp.write_all(&table.render()?)?;
    tmp.persist(&path).map_err(|e| CliError::Io(e.error))?;
    Ok(path)
}
