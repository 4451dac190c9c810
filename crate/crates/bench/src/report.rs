//! Per-cell report rows, aggregation and rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Method};

/// Outcome of one (method, K, repetition) cell. All measurements are
/// `None` when the cell failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: Method,
    pub k: usize,
    pub repetition: usize,
    pub mae: Option<f64>,
    pub total_simulations: Option<usize>,
    pub accepted: Option<usize>,
    pub completed: Option<bool>,
    pub wall_time_total: Option<f64>,
    pub wall_time_selection: Option<f64>,
    pub error: Option<String>,
}

impl ReportRow {
    pub fn failed(method: Method, k: usize, repetition: usize, error: String) -> Self {
        Self {
            method,
            k,
            repetition,
            mae: None,
            total_simulations: None,
            accepted: None,
            completed: None,
            wall_time_total: None,
            wall_time_selection: None,
            error: Some(error),
        }
    }
}

/// Mean and sample standard deviation (`None` below two values).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: Option<f64>,
    pub n: usize,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = (n > 1).then(|| {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        });
        Some(Self { mean, std, n })
    }
}

impl std::fmt::Display for MeanStd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.std {
            Some(s) => write!(f, "{:.2} ± {:.2}", self.mean, s),
            None => write!(f, "{:.2}", self.mean),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub method: Method,
    pub k: usize,
    pub cells: usize,
    pub failed: usize,
    pub completed: usize,
    pub mae: Option<MeanStd>,
    pub total_simulations: Option<MeanStd>,
    pub wall_time_total: Option<MeanStd>,
    pub wall_time_selection: Option<MeanStd>,
}

/// Groups rows by (method, K); null entries are skipped per column.
pub fn aggregate(rows: &[ReportRow]) -> Vec<Aggregate> {
    let mut groups: BTreeMap<(Method, usize), Vec<&ReportRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.method, r.k)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((method, k), rs)| {
            let col = |f: &dyn Fn(&ReportRow) -> Option<f64>| {
                MeanStd::of(&rs.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
            };
            Aggregate {
                method,
                k,
                cells: rs.len(),
                failed: rs.iter().filter(|r| r.error.is_some()).count(),
                completed: rs.iter().filter(|r| r.completed == Some(true)).count(),
                mae: col(&|r| r.mae),
                total_simulations: col(&|r| r.total_simulations.map(|v| v as f64)),
                wall_time_total: col(&|r| r.wall_time_total),
                wall_time_selection: col(&|r| r.wall_time_selection),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReservedMethod {
    pub method: String,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    pub aggregates: Vec<Aggregate>,
    /// Subset-selection baselines kept as placeholders in the tables.
    pub reserved: Vec<ReservedMethod>,
}

impl Report {
    pub fn new(config: ExperimentConfig, rows: Vec<ReportRow>) -> Self {
        let aggregates = aggregate(&rows);
        Self {
            schema_version: crate::config::SCHEMA_VERSION,
            config,
            rows,
            aggregates,
            reserved: ["AS", "ME"]
                .iter()
                .map(|m| ReservedMethod {
                    method: m.to_string(),
                    status: "not implemented".into(),
                })
                .collect(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("report.csv"))?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)?)?;
        std::fs::write(dir.join("report.txt"), self.render())?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join("report.json");
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Human-readable MAE and timing tables, one column per pool size.
    pub fn render(&self) -> String {
        let mut ks: Vec<usize> = self.aggregates.iter().map(|a| a.k).collect();
        ks.sort_unstable();
        ks.dedup();
        let mut methods: Vec<Method> = self.aggregates.iter().map(|a| a.method).collect();
        methods.sort();
        methods.dedup();
        let get = |m: Method, k: usize| self.aggregates.iter().find(|a| a.method == m && a.k == k);

        let mut out = String::new();
        let table =
            |out: &mut String, title: &str, cell: &dyn Fn(&Aggregate) -> Option<MeanStd>| {
                let _ = writeln!(out, "{title}");
                let _ = write!(out, "{:<18}", "method");
                for k in &ks {
                    let _ = write!(out, "{:>18}", format!("K={k}"));
                }
                let _ = writeln!(out);
                for r in &self.reserved {
                    let _ = write!(out, "{:<18}", r.method);
                    for _ in &ks {
                        let _ = write!(out, "{:>18}", r.status.as_str());
                    }
                    let _ = writeln!(out);
                }
                for &m in &methods {
                    let _ = write!(out, "{:<18}", m.as_str());
                    for &k in &ks {
                        let v = get(m, k).and_then(cell).map(|v| v.to_string());
                        let _ = write!(out, "{:>18}", v.unwrap_or_else(|| "-".into()));
                    }
                    let _ = writeln!(out);
                }
                let _ = writeln!(out);
            };
        table(&mut out, "Mean absolute error", &|a| a.mae);
        table(&mut out, "Total inference time (s)", &|a| a.wall_time_total);
        table(&mut out, "Statistic selection time (s)", &|a| {
            a.wall_time_selection
        });
        table(&mut out, "Simulations used", &|a| a.total_simulations);
        let failures: Vec<&ReportRow> = self.rows.iter().filter(|r| r.error.is_some()).collect();
        if !failures.is_empty() {
            let _ = writeln!(out, "Failed cells");
            for r in failures {
                let _ = writeln!(
                    out,
                    "  {} K={} rep={}: {}",
                    r.method,
                    r.k,
                    r.repetition,
                    r.error.as_deref().unwrap_or("")
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(method: Method, k: usize, rep: usize, mae: Option<f64>) -> ReportRow {
        match mae {
            Some(m) => ReportRow {
                method,
                k,
                repetition: rep,
                mae: Some(m),
                total_simulations: Some(100),
                accepted: Some(10),
                completed: Some(true),
                wall_time_total: Some(2.0),
                wall_time_selection: Some(0.01),
                error: None,
            },
            None => ReportRow::failed(method, k, rep, "boom".into()),
        }
    }

    #[test]
    fn aggregate_uses_sample_std() {
        let rows: Vec<_> = [7.0, 8.0, 9.0]
            .iter()
            .enumerate()
            .map(|(i, &m)| row(Method::MabEpsFirst, 10, i, Some(m)))
            .collect();
        let agg = aggregate(&rows);
        let mae = agg[0].mae.unwrap();
        assert_eq!(mae.mean, 8.0);
        assert_eq!(mae.std, Some(1.0));
        assert_eq!(mae.to_string(), "8.00 ± 1.00");
    }

    #[test]
    fn failed_cells_do_not_contaminate_neighbours() {
        let rows = vec![
            row(Method::MabEpsFirst, 10, 0, Some(7.0)),
            row(Method::MabEpsFirst, 10, 1, None),
            row(Method::MabEpsFirst, 10, 2, Some(9.0)),
            row(Method::StaticSingle, 10, 0, None),
        ];
        let agg = aggregate(&rows);
        let mab = agg
            .iter()
            .find(|a| a.method == Method::MabEpsFirst)
            .unwrap();
        assert_eq!(mab.cells, 3);
        assert_eq!(mab.failed, 1);
        assert_eq!(mab.mae.unwrap().mean, 8.0);
        let single = agg
            .iter()
            .find(|a| a.method == Method::StaticSingle)
            .unwrap();
        assert_eq!(single.mae, None);
    }

    #[test]
    fn render_has_dashes_and_reserved_rows() {
        let rows = vec![
            row(Method::StaticSingle, 10, 0, None),
            row(Method::MabEpsFirst, 20, 0, Some(1.5)),
        ];
        let cfg = crate::config::ExperimentConfig::from_toml(
            r#"
schema_version = 1
model = "birth_death"
seed = 1
pool_sizes = [10, 20]
methods = ["mab_eps_first", "static_single"]
output_dir = "x"
[observed]
n_trajectories = 1
n_grid_points = 5
t_end = 1.0
"#,
        )
        .unwrap();
        let text = Report::new(cfg, rows).render();
        assert!(text.contains("AS"));
        assert!(text.contains("not implemented"));
        assert!(text.contains("K=20"));
        assert!(text.contains("1.50"));
        assert!(text.contains(" -"));
    }
}
