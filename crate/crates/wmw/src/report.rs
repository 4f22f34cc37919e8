//! Tabular output as CSV or markdown.

use std::io::Write;

use clap::ValueEnum;
use wmw_core::simulate::SimulationSummary;
use wmw_core::{PermutationResult, TestResult};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.headers)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
            Format::Markdown => {
                let line = |cells: &[String]| format!("| {} |", cells.join(" | "));
                writeln!(out, "{}", line(&self.headers))?;
                writeln!(out, "|{}", "---|".repeat(self.headers.len()))?;
                for row in &self.rows {
                    writeln!(out, "{}", line(row))?;
                }
            }
        }
        Ok(())
    }

    pub fn to_string(&self, format: Format) -> String {
        let mut buf = Vec::new();
        self.write(format, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 output")
    }
}

pub const SIMULATION_HEADERS: [&str; 10] = [
    "n1",
    "n2",
    "dist1",
    "dist2",
    "test",
    "df_kind",
    "rejection_rate",
    "mc_se",
    "n_reps",
    "seed",
];

/// Name of a test in simulation output; permutation versions carry a
/// `PERM_` prefix.
pub fn test_label(name: &str, permutation: bool) -> String {
    if permutation {
        format!("PERM_{name}")
    } else {
        name.to_string()
    }
}

pub fn simulation_table(summaries: &[SimulationSummary]) -> Table {
    let mut t = Table::new(SIMULATION_HEADERS);
    for s in summaries {
        let sc = &s.scenario;
        for r in &s.rates {
            let df = match (r.permutation, r.kind.df_kind()) {
                (false, Some(d)) => d.name().to_string(),
                _ => String::new(),
            };
            t.push(vec![
                sc.n1.to_string(),
                sc.n2.to_string(),
                sc.dist1.to_string(),
                sc.dist2.to_string(),
                test_label(r.kind.name(), r.permutation),
                df,
                format!("{:.6}", r.rate),
                format!("{:.6}", s.mc_standard_error),
                sc.n_reps.to_string(),
                sc.master_seed.to_string(),
            ]);
        }
    }
    t
}

/// One row per test. Numbers are printed in shortest round-trip form.
pub fn test_table(results: &[TestResult], alpha: f64, permutation: Option<&[PermutationResult]>) -> Table {
    let mut headers = vec!["test", "df_kind", "statistic", "df", "p_value", "reject", "p_hat", "degeneracy"];
    if permutation.is_some() {
        headers.push("perm_p_value");
    }
    let mut t = Table::new(headers);
    for r in results {
        let mut row = vec![
            r.kind.name().to_string(),
            r.kind.df_kind().map_or(String::new(), |d| d.name().to_string()),
            r.statistic.to_string(),
            r.df.map_or(String::new(), |d| d.to_string()),
            r.p_value.to_string(),
            r.rejects(alpha).to_string(),
            r.effect.p_hat.to_string(),
            notes(r),
        ];
        if let Some(perm) = permutation {
            let p = perm.iter().find(|p| p.observed.kind == r.kind);
            row.push(p.map_or(String::new(), |p| p.p_value.to_string()));
        }
        t.push(row);
    }
    t
}

fn notes(r: &TestResult) -> String {
    let mut parts = vec![r.degenerate.name().to_string()];
    if let Some(w) = r.variance.warning {
        parts.push(format!("{w:?}"));
    }
    parts.join(";")
}
