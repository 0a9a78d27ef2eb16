//! Result rows, the CSV schema, and plot-ready aggregation files.
//!
//! CSV header: `loss,algo,run,step,loss_value,grad_norm,dist,min_dist,status`.
//! Floats are printed with 17 significant digits so parsing them back yields
//! bit-identical values.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nce_landscape::objective::LossKind;
use nce_landscape::optim::Algo;
use thiserror::Error;

use crate::config::{parse_algo, parse_loss};

pub const CSV_HEADER: &str = "loss,algo,run,step,loss_value,grad_norm,dist,min_dist,status";

#[derive(Debug, Error)]
pub enum TableError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Malformed { path: String, line: usize, msg: String },
}

fn io_err(path: &Path, source: std::io::Error) -> TableError {
    TableError::Io { path: path.display().to_string(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// The optimizer left the trust region; the cell keeps its rows up to
    /// the last finite iterate.
    Diverged,
    /// Newton hit a numerically singular Hessian at the recorded step.
    Singular,
}

impl RowStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Diverged => "diverged",
            RowStatus::Singular => "singular",
        }
    }

    pub fn parse(v: &str) -> Option<RowStatus> {
        match v {
            "ok" => Some(RowStatus::Ok),
            "diverged" => Some(RowStatus::Diverged),
            "singular" => Some(RowStatus::Singular),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub loss: LossKind,
    pub algo: Algo,
    pub run: usize,
    pub step: usize,
    pub loss_value: f64,
    pub grad_norm: f64,
    pub dist: f64,
    pub min_dist: f64,
    pub status: RowStatus,
}

fn sort_key(r: &ResultRow) -> (u8, u8, usize, usize) {
    (r.loss as u8, r.algo as u8, r.run, r.step)
}

/// All rows of a sweep, kept sorted by (loss, algo, run, step).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn new(mut rows: Vec<ResultRow>) -> Self {
        rows.sort_by_key(sort_key);
        ResultTable { rows }
    }

    pub fn rows(&self) -> &[ResultRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distinct (loss, algo) cells in row order.
    pub fn cells(&self) -> Vec<(LossKind, Algo)> {
        let mut out: Vec<(LossKind, Algo)> = Vec::new();
        for r in &self.rows {
            if !out.contains(&(r.loss, r.algo)) {
                out.push((r.loss, r.algo));
            }
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                r.loss.label(),
                r.algo.label(),
                r.run,
                r.step,
                r.loss_value,
                r.grad_norm,
                r.dist,
                r.min_dist,
                r.status.label()
            );
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), TableError> {
        std::fs::write(path, self.render_csv()).map_err(|e| io_err(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<ResultTable, TableError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let display = path.display().to_string();
        let malformed = |line: usize, msg: String| TableError::Malformed {
            path: display.clone(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == CSV_HEADER => {}
            Some((_, h)) => return Err(malformed(1, format!("unexpected header `{h}`"))),
            None => return Err(malformed(1, "empty file".into())),
        }
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 9 {
                return Err(malformed(line_no, format!("expected 9 fields, got {}", parts.len())));
            }
            let loss = parse_loss(parts[0])
                .ok_or_else(|| malformed(line_no, format!("unknown loss `{}`", parts[0])))?;
            let algo = parse_algo(parts[1])
                .ok_or_else(|| malformed(line_no, format!("unknown algo `{}`", parts[1])))?;
            let run = parts[2]
                .parse::<usize>()
                .map_err(|_| malformed(line_no, format!("bad run index `{}`", parts[2])))?;
            let step = parts[3]
                .parse::<usize>()
                .map_err(|_| malformed(line_no, format!("bad step `{}`", parts[3])))?;
            let mut nums = [0.0_f64; 4];
            for (k, field) in parts[4..8].iter().enumerate() {
                nums[k] = field
                    .parse::<f64>()
                    .map_err(|_| malformed(line_no, format!("bad number `{field}`")))?;
            }
            let status = RowStatus::parse(parts[8])
                .ok_or_else(|| malformed(line_no, format!("unknown status `{}`", parts[8])))?;
            rows.push(ResultRow {
                loss,
                algo,
                run,
                step,
                loss_value: nums[0],
                grad_norm: nums[1],
                dist: nums[2],
                min_dist: nums[3],
                status,
            });
        }
        Ok(ResultTable::new(rows))
    }

    /// Writes one whitespace-separated distance file per (loss, algo) plus a
    /// log10-loss companion: columns are the step, the mean over runs, the
    /// standard deviation over runs, and the designated best run's value.
    /// Returns the created paths.
    pub fn emit_plot_data(
        &self,
        dir: &Path,
        best_runs: &[(LossKind, Algo, usize)],
    ) -> Result<Vec<PathBuf>, TableError> {
        let mut created = Vec::new();
        for (loss, algo) in self.cells() {
            let best = best_runs
                .iter()
                .find(|(l, a, _)| *l == loss && *a == algo)
                .map(|(_, _, r)| *r)
                .unwrap_or(0);
            let cell_rows: Vec<&ResultRow> =
                self.rows.iter().filter(|r| r.loss == loss && r.algo == algo).collect();
            let max_step = cell_rows.iter().map(|r| r.step).max().unwrap_or(0);

            let dist_path = dir.join(format!("plot_{}_{}_dist.dat", loss.label(), algo.label()));
            write_series(
                &dist_path,
                "# step mean_min_dist std_min_dist best_run_min_dist",
                &cell_rows,
                max_step,
                best,
                |r| r.min_dist,
            )?;
            created.push(dist_path);
            let loss_path = dir.join(format!("plot_{}_{}_logloss.dat", loss.label(), algo.label()));
            write_series(
                &loss_path,
                "# step mean_log10_loss std_log10_loss best_run_log10_loss",
                &cell_rows,
                max_step,
                best,
                |r| r.loss_value.log10(),
            )?;
            created.push(loss_path);
        }
        Ok(created)
    }
}

fn write_series(
    path: &Path,
    header: &str,
    cell_rows: &[&ResultRow],
    max_step: usize,
    best: usize,
    value: impl Fn(&ResultRow) -> f64,
) -> Result<(), TableError> {
    let mut text = String::new();
    text.push_str(header);
    text.push('\n');
    for step in 0..=max_step {
        let values: Vec<f64> =
            cell_rows.iter().filter(|r| r.step == step).map(|r| value(r)).collect();
        if values.is_empty() {
            continue;
        }
        let (mean, std) = mean_and_std(&values);
        let best_value = cell_rows
            .iter()
            .find(|r| r.step == step && r.run == best)
            .map(|r| value(r))
            .unwrap_or(f64::NAN);
        let _ = writeln!(text, "{step} {mean:.16e} {std:.16e} {best_value:.16e}");
    }
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Mean and population standard deviation; bit-identical inputs short-circuit
/// to an exactly zero deviation.
fn mean_and_std(values: &[f64]) -> (f64, f64) {
    if values.windows(2).all(|w| w[0].to_bits() == w[1].to_bits()) {
        return (values[0], 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.max(0.0).sqrt())
}
