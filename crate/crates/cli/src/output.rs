//! Plain-text tables, CSV rows and artifact files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use trapcv_core::numfmt;

use crate::fail::{Failure, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Rows of string cells with a header; renders as an aligned table or CSV.
#[derive(Clone, Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut width: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = cells
                .iter()
                .zip(&width)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ");
            s.truncate(s.trim_end().len());
            s.push('\n');
            s
        };
        let mut out = line(&self.header);
        let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&line(&rule));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }

    pub fn csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Full-precision cell for files and machine-readable output.
pub fn exact(x: f64) -> String {
    if x.is_finite() {
        numfmt::float(x)
    } else {
        x.to_string()
    }
}

/// Short cell for human-readable tables.
pub fn short(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6e}")
    } else {
        x.to_string()
    }
}

pub fn opt_short(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), short)
}

pub fn ensure_dir(dir: &Path) -> Outcome<()> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))
}

pub fn write(path: &Path, contents: &str) -> Outcome<PathBuf> {
    fs::write(path, contents).map_err(|e| Failure::io(path, e))?;
    log::info!("wrote {}", path.display());
    Ok(path.to_path_buf())
}

pub fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}
