//! CSV and JSON writers.
//!
//! CSV files start with `#` lines carrying the tool version, the command and
//! the resolved configuration as TOML, followed by one column-header line.
//! Numbers use 12 significant digits; `-0` is written as `0`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::config::RunConfig;
use crate::CliError;

pub fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(command: &str, config: &RunConfig, extra: &[String], columns: &[&str]) -> Self {
        let mut buf = String::new();
        let _ = writeln!(buf, "# pontus {} {command}", env!("CARGO_PKG_VERSION"));
        for line in extra {
            let _ = writeln!(buf, "# {line}");
        }
        for line in config.to_toml().lines() {
            if line.is_empty() {
                buf.push_str("#\n");
            } else {
                let _ = writeln!(buf, "# {line}");
            }
        }
        buf.push_str(&columns.join(","));
        buf.push('\n');
        Self { buf }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|source| CliError::Io { path: p.to_owned(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}
