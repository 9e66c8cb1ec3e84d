//! Tabular reports: fixed-point vs oracle comparisons, asymptotic sweeps,
//! and rendering to text, CSV or JSON.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::asymptotics::{second_order_kp, second_order_kp_corrected, sharp_estimate, sharp_estimate_corrected};
use crate::oracle::find_eigenvalue;
use crate::perturbation::SeriesConfig;
use crate::potential::StepPotential;
use crate::solver::{check_condition, solve};
use crate::{Error, Result};

/// Oracle bisection tolerance used by reports.
pub const ORACLE_TOL: f64 = 1e-13;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "KP_THREADS";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Bool(bool),
    /// Absent value; the label is shown in text and CSV, `null` in JSON.
    Missing(&'static str),
}

pub const NOT_APPLICABLE: Cell = Cell::Missing("NOT_APPLICABLE");
pub const SKIPPED: Cell = Cell::Missing("SKIPPED");

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    /// Keeps only the named columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<Table> {
        let idx = names
            .iter()
            .map(|name| {
                self.columns
                    .iter()
                    .position(|c| c == name)
                    .ok_or_else(|| Error::Usage(format!(
                        "unknown column `{name}`; available: {}",
                        self.columns.join(", ")
                    )))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Table {
            columns: idx.iter().map(|&i| self.columns[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| idx.iter().map(|&i| r[i].clone()).collect())
                .collect(),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Usage(format!("unknown format `{other}` (text, csv, json)"))),
        }
    }
}

pub fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Text => render_text(table),
        Format::Csv => render_csv(table),
        Format::Json => render_json(table),
    }
}

fn text_cell(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Real(v) => format!("{v:.12}"),
        Cell::Bool(v) => v.to_string(),
        Cell::Missing(label) => label.to_string(),
    }
}

fn render_text(table: &Table) -> String {
    let cells: Vec<Vec<String>> = table.rows.iter().map(|r| r.iter().map(text_cell).collect()).collect();
    let widths: Vec<usize> = table
        .columns
        .iter()
        .enumerate()
        .map(|(j, h)| cells.iter().map(|r| r[j].len()).chain([h.len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |out: &mut String, items: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = items
            .zip(&widths)
            .map(|(s, &w)| format!("{s:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &mut table.columns.iter().map(String::as_str));
    for r in &cells {
        line(&mut out, &mut r.iter().map(String::as_str));
    }
    out
}

/// 17 significant digits, enough to round-trip any `f64`.
fn csv_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn render_csv(table: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for r in &table.rows {
        let rec: Vec<String> = r
            .iter()
            .map(|c| match c {
                Cell::Real(v) => csv_real(*v),
                other => text_cell(other),
            })
            .collect();
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn render_json(table: &Table) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            let mut m = Map::new();
            for (k, c) in table.columns.iter().zip(r) {
                let v = match c {
                    Cell::Int(v) => Value::from(*v),
                    Cell::Real(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
                    Cell::Bool(v) => Value::Bool(*v),
                    Cell::Missing(_) => Value::Null,
                };
                m.insert(k.clone(), v);
            }
            Value::Object(m)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("json");
    s.push('\n');
    s
}

/// Runs `f` on a pool capped by `KP_THREADS` when set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&k| k > 0);
    match cap.and_then(|k| rayon::ThreadPoolBuilder::new().num_threads(k).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

/// Fails with the gate diagnostic for the first inadmissible index.
pub fn check_all(q: &StepPotential, ns: &[u32]) -> Result<()> {
    for &n in ns {
        let c = check_condition(q, n);
        if !c.admissible {
            return Err(c.into_error());
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub n: u32,
    pub fixed_point: f64,
    pub oracle: f64,
    /// `None` for potentials with more than two pieces.
    pub thm2: Option<f64>,
    pub sharp: f64,
    pub total_bound: Option<f64>,
    pub observed_err: f64,
    /// `None` when `total_bound` is not applicable.
    pub bound_ok: Option<bool>,
}

impl ComparisonRow {
    pub fn compute(q: &StepPotential, cfg: &SeriesConfig) -> Result<Self> {
        let est = solve(q, cfg)?;
        let oracle = find_eigenvalue(q, cfg.n, ORACLE_TOL)?.value;
        let thm2 = match second_order_kp(q, cfg.n) {
            Ok(v) => Some(v),
            Err(Error::NotTwoPiece { .. }) => None,
            Err(e) => return Err(e),
        };
        let total_bound = est.error_bound();
        let observed_err = (oracle - est.value).abs();
        Ok(Self {
            n: cfg.n,
            fixed_point: est.value,
            oracle,
            thm2,
            sharp: sharp_estimate(q, cfg.n)?,
            total_bound,
            observed_err,
            bound_ok: total_bound.map(|b| observed_err <= b),
        })
    }
}

pub const COMPARISON_COLUMNS: [&str; 8] = [
    "n", "fixed_point", "oracle", "thm2", "sharp", "total_bound", "observed_err", "bound_ok",
];

/// One row per `n`, computed in parallel; order follows `ns`.
pub fn compare(q: &StepPotential, base: &SeriesConfig, ns: &[u32]) -> Result<Vec<ComparisonRow>> {
    check_all(q, ns)?;
    with_thread_cap(|| {
        ns.par_iter()
            .map(|&n| ComparisonRow::compute(q, &SeriesConfig { n, ..*base }))
            .collect()
    })
}

pub fn comparison_table(rows: &[ComparisonRow]) -> Table {
    let mut t = Table::new(COMPARISON_COLUMNS);
    for r in rows {
        t.push(vec![
            r.n.into(),
            r.fixed_point.into(),
            r.oracle.into(),
            r.thm2.map_or(NOT_APPLICABLE, Cell::Real),
            r.sharp.into(),
            r.total_bound.map_or(NOT_APPLICABLE, Cell::Real),
            r.observed_err.into(),
            r.bound_ok.map_or(SKIPPED, Cell::Bool),
        ]);
    }
    t
}

/// Residual-scaling study against the oracle for one `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub oracle: f64,
    pub thm2: f64,
    pub thm2_corrected: f64,
    pub sharp: f64,
    pub sharp_corrected: f64,
}

impl SweepRow {
    pub fn compute(q: &StepPotential, n: u32) -> Result<Self> {
        Ok(Self {
            n,
            oracle: find_eigenvalue(q, n, ORACLE_TOL)?.value,
            thm2: second_order_kp(q, n)?,
            thm2_corrected: second_order_kp_corrected(q, n)?,
            sharp: sharp_estimate(q, n)?,
            sharp_corrected: sharp_estimate_corrected(q, n)?,
        })
    }

    /// `n³ · |oracle - estimate|`.
    pub fn scaled(&self, estimate: f64) -> f64 {
        (self.n as f64).powi(3) * (self.oracle - estimate).abs()
    }
}

pub const SWEEP_COLUMNS: [&str; 10] = [
    "n",
    "oracle",
    "thm2",
    "thm2_residual",
    "thm2_residual_scaled",
    "thm2_corrected_residual_scaled",
    "sharp",
    "sharp_residual_scaled",
    "sharp_corrected_residual_scaled",
    "oracle_minus_n2",
];

pub fn sweep(q: &StepPotential, ns: &[u32]) -> Result<Vec<SweepRow>> {
    check_all(q, ns)?;
    if q.two_piece().is_none() {
        return Err(Error::NotTwoPiece { pieces: q.num_pieces() });
    }
    with_thread_cap(|| ns.par_iter().map(|&n| SweepRow::compute(q, n)).collect())
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(SWEEP_COLUMNS);
    for r in rows {
        let n2 = (r.n as f64).powi(2);
        t.push(vec![
            r.n.into(),
            r.oracle.into(),
            r.thm2.into(),
            (r.oracle - r.thm2).abs().into(),
            r.scaled(r.thm2).into(),
            r.scaled(r.thm2_corrected).into(),
            r.sharp.into(),
            r.scaled(r.sharp).into(),
            r.scaled(r.sharp_corrected).into(),
            (r.oracle - n2).into(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_row() -> Table {
        let rows = compare(&StepPotential::zero(), &SeriesConfig::new(1), &[2]).unwrap();
        comparison_table(&rows)
    }

    #[test]
    fn empty_csv_is_header_only() {
        let t = Table::new(COMPARISON_COLUMNS);
        assert_eq!(render(&t, Format::Csv), COMPARISON_COLUMNS.join(",") + "\n");
        assert_eq!(render(&t, Format::Json), "[]\n");
    }

    #[test]
    fn zero_potential_row_in_all_formats() {
        let t = zero_row();
        assert_eq!(t.rows[0][1], Cell::Real(4.0));
        assert_eq!(t.rows[0][2], Cell::Real(4.0));
        let text = render(&t, Format::Text);
        assert!(text.contains("4.000000000000"));
        let csv = render(&t, Format::Csv);
        assert!(csv.contains("4.0000000000000000e0"));
        let json: Value = serde_json::from_str(&render(&t, Format::Json)).unwrap();
        assert_eq!(json[0]["fixed_point"], 4.0);
        assert_eq!(json[0]["oracle"], 4.0);
        assert_eq!(json[0]["bound_ok"], true);
    }

    #[test]
    fn missing_values() {
        let mut t = Table::new(["n", "total_bound", "bound_ok"]);
        t.push(vec![3u32.into(), NOT_APPLICABLE, SKIPPED]);
        assert!(render(&t, Format::Text).contains("NOT_APPLICABLE"));
        assert!(render(&t, Format::Csv).contains("3,NOT_APPLICABLE,SKIPPED"));
        let json: Value = serde_json::from_str(&render(&t, Format::Json)).unwrap();
        assert!(json[0]["total_bound"].is_null());
        assert!(json[0]["bound_ok"].is_null());
    }

    #[test]
    fn text_is_aligned() {
        let mut t = Table::new(["n", "value"]);
        t.push(vec![1u32.into(), 0.5.into()]);
        t.push(vec![10u32.into(), 100.25.into()]);
        let text = render(&t, Format::Text);
        let lens: Vec<usize> = text.lines().map(str::len).collect();
        assert!(lens.windows(2).all(|w| w[0] == w[1]), "{text}");
    }

    #[test]
    fn select_columns() {
        let t = zero_row().select(&["n", "oracle"]).unwrap();
        assert_eq!(t.columns, vec!["n", "oracle"]);
        assert!(zero_row().select(&["nope"]).is_err());
    }

    #[test]
    fn format_parse() {
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert!("xml".parse::<Format>().is_err());
    }
}
