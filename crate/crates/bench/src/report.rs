use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub resolution: usize,
    pub error: f64,
    /// log2(E(coarse) / E(fine)) against the previous row.
    pub rate: Option<f64>,
    pub cpu_s: f64,
    pub mem_values: usize,
    pub quad_count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub config: String,
    pub reference: String,
    pub date: String,
    pub rows: Vec<ConvergenceRow>,
}

/// Observed orders between adjacent errors; the first entry is empty.
pub fn rates(errors: &[f64]) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(errors.len());
    if !errors.is_empty() {
        out.push(None);
    }
    out.extend(errors.windows(2).map(|w| Some((w[0] / w[1]).log2())));
    out
}

pub const CSV_COLUMNS: [&str; 6] = [
    "resolution",
    "error",
    "rate",
    "cpu_s",
    "mem_values",
    "quad_count",
];

impl ConvergenceReport {
    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate).collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS)?;
        for r in &self.rows {
            w.write_record([
                r.resolution.to_string(),
                format!("{:e}", r.error),
                r.rate.map(|x| x.to_string()).unwrap_or_default(),
                format!("{:.6}", r.cpu_s),
                r.mem_values.to_string(),
                r.quad_count.map(|q| q.to_string()).unwrap_or_default(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "Study: {}  ", self.config);
        let _ = writeln!(s, "Reference: {}  ", self.reference);
        let _ = writeln!(s, "Date: {}\n", self.date);
        s.push_str("| resolution | E | rate | CPU (s) | memory (values) | N_eps |\n");
        s.push_str("|---:|---:|---:|---:|---:|---:|\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "| {} | {:.4e} | {} | {:.3} | {:.2e} | {} |",
                r.resolution,
                r.error,
                r.rate
                    .map(|x| format!("{x:.2}"))
                    .unwrap_or_else(|| "-".into()),
                r.cpu_s,
                r.mem_values as f64,
                r.quad_count
                    .map(|q| q.to_string())
                    .unwrap_or_else(|| "-".into()),
            );
        }
        s
    }

    /// Writes the CSV to `path` and the Markdown table next to it.
    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        fs::write(path, self.to_csv()?)?;
        fs::write(path.with_extension("md"), self.to_markdown())?;
        Ok(())
    }
}
