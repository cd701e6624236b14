//! CSV reports with a leading comment block.

use crate::cli::ModelConfig;
use crate::error::{Error, Result};

/// Overall verdict of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

/// A report: `#`-comment header, one CSV header row, data rows.
#[derive(Clone, Debug)]
pub struct Report {
    header: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
    pub status: Status,
}

impl Report {
    /// Start a report recording the program version, command, model name,
    /// configuration hash and tolerances.
    pub fn new(command: &str, cfg: &ModelConfig) -> Self {
        let t = &cfg.tolerances;
        let header = vec![
            format!("treewalk {}", env!("CARGO_PKG_VERSION")),
            format!("command: {command}"),
            format!("model: {}", cfg.name),
            format!("config_sha256: {}", cfg.hash),
            format!(
                "tolerances: fixed_point={:e} identity={:e} radius={:e} ratio={:e} alpha={:e} transfer={} z_max={}",
                t.fixed_point, t.identity, t.radius, t.ratio, t.alpha, t.transfer, t.z_max
            ),
        ];
        Report { header, columns: Vec::new(), rows: Vec::new(), status: Status::Pass }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.header.push(line.into());
    }

    pub fn columns(&mut self, cols: &[&str]) {
        self.columns = cols.iter().map(|c| c.to_string()).collect();
    }

    pub fn row(&mut self, fields: Vec<String>) {
        self.rows.push(fields);
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn fail(&mut self) {
        self.status = Status::Fail;
    }

    pub fn render(&self) -> Result<String> {
        let mut out = String::new();
        for h in &self.header {
            out.push_str("# ");
            out.push_str(h);
            out.push('\n');
        }
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
        if !self.columns.is_empty() {
            w.write_record(&self.columns).map_err(csv_err)?;
        }
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))?);
        Ok(out)
    }
}
