//! Block-combination sweep and its tabular rendering.

use std::fmt::Write;

use super::protocol::{run_protocol, Dataset, EvalReport, Method, Metric, ProtocolConfig};
use crate::error::{Error, Result};
use crate::linear::Task;

/// Non-empty subsets of `n` blocks as bitmasks (bit `i` = block `i`).
///
/// For three blocks the order is the familiar table layout: each block
/// alone, then {0,2}, {0,1}, {1,2}, then all three. Other sizes go by
/// subset size, then lexicographically.
pub fn combination_order(n: usize) -> Vec<u32> {
    if n == 3 {
        return vec![0b001, 0b010, 0b100, 0b101, 0b011, 0b110, 0b111];
    }
    let mut subsets: Vec<u32> = (1..(1u32 << n)).collect();
    subsets.sort_by_key(|&s| {
        let members: Vec<u32> = (0..n as u32).filter(|i| s & (1 << i) != 0).collect();
        (members.len(), members)
    });
    subsets
}

/// Runs the baseline on every non-empty block combination, then the GA on
/// the concatenation of all blocks. Every row shares the master seed, so all
/// rows see the same fold plans.
pub fn sweep_combinations(
    dataset: &Dataset,
    task: Task,
    config: &ProtocolConfig,
) -> Result<Vec<EvalReport>> {
    let names = dataset.block_names();
    if names.is_empty() {
        return Err(Error::Empty("sweep_combinations"));
    }
    let baseline = Method::baseline(task);
    let mut reports = Vec::new();
    for subset in combination_order(names.len()) {
        let chosen: Vec<String> = names
            .iter()
            .enumerate()
            .filter(|(i, _)| subset & (1 << i) != 0)
            .map(|(_, n)| n.clone())
            .collect();
        reports.push(run_protocol(dataset, &chosen, baseline, task, config)?);
    }
    reports.push(run_protocol(dataset, &names, Method::Ga, task, config)?);
    Ok(reports)
}

/// Rows of a sweep table, possibly spanning several datasets.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub block_columns: Vec<String>,
    pub datasets: Vec<String>,
    pub metric: Metric,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone)]
pub struct TableRow {
    pub blocks: Vec<String>,
    pub ga: bool,
    /// Feature count per dataset: the block dims, or the mean GA popcount.
    pub features: Vec<Option<f64>>,
    pub values: Vec<Option<f64>>,
}

impl SweepTable {
    /// Merges per-dataset sweeps into one table keyed by (blocks, GA flag).
    pub fn build(sweeps: &[Vec<EvalReport>]) -> Result<Self> {
        let first = sweeps
            .iter()
            .flat_map(|s| s.first())
            .next()
            .ok_or(Error::Empty("SweepTable::build"))?;
        let metric = first.metric;
        let mut block_columns: Vec<String> = Vec::new();
        let mut rows: Vec<TableRow> = Vec::new();
        for (d, sweep) in sweeps.iter().enumerate() {
            for r in sweep {
                if r.metric != metric {
                    return Err(Error::Config(
                        "cannot mix GCR and LCC sweeps in one table".into(),
                    ));
                }
                for b in &r.blocks {
                    if !block_columns.contains(b) {
                        block_columns.push(b.clone());
                    }
                }
                let ga = r.method == Method::Ga;
                let idx = match rows
                    .iter()
                    .position(|row| row.blocks == r.blocks && row.ga == ga)
                {
                    Some(i) => i,
                    None => {
                        rows.push(TableRow {
                            blocks: r.blocks.clone(),
                            ga,
                            features: vec![None; sweeps.len()],
                            values: vec![None; sweeps.len()],
                        });
                        rows.len() - 1
                    }
                };
                rows[idx].features[d] =
                    Some(r.mean_selected_features.unwrap_or(r.n_features as f64));
                rows[idx].values[d] = Some(r.mean);
            }
        }
        crate::store::sort_canonical(&mut block_columns);
        Ok(SweepTable {
            block_columns,
            datasets: sweeps
                .iter()
                .map(|s| s.first().map_or_else(String::new, |r| r.dataset.clone()))
                .collect(),
            metric,
            rows,
        })
    }

    fn features_cell(row: &TableRow) -> String {
        let mut counts: Vec<String> = row
            .features
            .iter()
            .flatten()
            .map(|c| format!("{:.0}", c))
            .collect();
        counts.dedup();
        counts.join("/")
    }

    fn value_cell(&self, v: Option<f64>) -> String {
        match (v, self.metric) {
            (None, _) => "-".into(),
            (Some(v), Metric::Gcr) => format!("{:.1}", v * 100.0),
            (Some(v), Metric::Lcc) => format!("{v:.2}"),
        }
    }

    fn header(&self) -> Vec<String> {
        let unit = match self.metric {
            Metric::Gcr => "GCR (%)",
            Metric::Lcc => "LCC",
        };
        let mut h = self.block_columns.clone();
        h.push("#features".into());
        h.push("GA".into());
        h.extend(self.datasets.iter().map(|d| format!("{unit} {d}")));
        h
    }

    fn cells(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|row| {
                let mut c: Vec<String> = self
                    .block_columns
                    .iter()
                    .map(|b| if row.blocks.contains(b) { "x" } else { "" }.to_owned())
                    .collect();
                c.push(Self::features_cell(row));
                c.push(if row.ga { "x" } else { "" }.to_owned());
                c.extend(row.values.iter().map(|&v| self.value_cell(v)));
                c
            })
            .collect()
    }

    /// Aligned plain-text table.
    pub fn render_text(&self) -> String {
        let header = self.header();
        let cells = self.cells();
        let widths: Vec<usize> = (0..header.len())
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].len())
                    .chain([header[j].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        let line = |out: &mut String, row: &[String]| {
            let parts: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:>w$}"))
                .collect();
            writeln!(out, "{}", parts.join("  ").trim_end()).unwrap();
        };
        line(&mut out, &header);
        let total = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
        writeln!(out, "{}", "-".repeat(total)).unwrap();
        for row in &cells {
            line(&mut out, row);
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header()).expect("in-memory write");
        for row in self.cells() {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is UTF-8")
    }
}
