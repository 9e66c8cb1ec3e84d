//! Command-line front end.
//!
//! ```text
//! kp-dirichlet estimate   --jump 1 --c pi/2 --n 1..6 [--r 5 --s 5 --tol 1e-15 --max-iter 50]
//! kp-dirichlet oracle     --a -4/3 --b 2/3 --c pi/3 --n 2..6 [--tol 1e-13]
//! kp-dirichlet asymptotic --jump 1 --c pi/3 --n 10..20 [--cutoff 1000000]
//! kp-dirichlet compare    --jump 1 --c pi/2 --n 1..6 --format csv
//! kp-dirichlet sweep      --jump 1 --c pi/2 --n 8..128 --column thm2_residual_scaled
//! ```
//!
//! Every subcommand also takes `--config FILE` with `key = value` lines using
//! the flag names (`pieces = [[0, 1], ["pi/4", -3], ["pi/2", 1]]` gives a
//! multi-step potential by left endpoints). Flags override the file.
//!
//! Exit codes: 0 success, 2 usage or admissibility errors, 1 numerical failures.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::Value;

use crate::asymptotics::{eq8_estimate, second_order_kp, second_order_kp_corrected, sharp_estimate, sharp_estimate_corrected};
use crate::oracle::find_eigenvalue;
use crate::perturbation::SeriesConfig;
use crate::potential::{make_kronig_penney, Breakpoint, StepPotential};
use crate::report::{self, check_all, render, with_thread_cap, Cell, Format, Table, NOT_APPLICABLE};
use crate::solver::solve;
use crate::{Error, Result};

const SYNOPSIS: &str =
    "usage: kp-dirichlet <estimate|oracle|asymptotic|compare|sweep> [options]  (see --help)";

/// Keys accepted in a config file.
const CONFIG_KEYS: [&str; 13] = [
    "jump", "a", "b", "c", "pieces", "n", "format", "r", "s", "tol", "max-iter", "cutoff", "column",
];

#[derive(Debug, Parser)]
#[command(name = "kp-dirichlet", version, about = "Dirichlet eigenvalues for Kronig–Penney step potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fixed-point estimates with their error budget.
    Estimate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// Transfer-matrix eigenvalues.
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        /// Bisection tolerance.
        #[arg(long, allow_hyphen_values = true)]
        tol: Option<String>,
    },
    /// Second-order and sharp asymptotic formulas.
    Asymptotic {
        #[command(flatten)]
        common: CommonArgs,
        /// Add the truncated direct-series estimate with this cutoff.
        #[arg(long)]
        cutoff: Option<String>,
    },
    /// Fixed point, oracle and asymptotics side by side.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// n³-scaled residuals of the asymptotic formulas against the oracle.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated columns to keep (n is always kept).
        #[arg(long)]
        column: Option<String>,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Jump b - a of a mean-zero two-piece potential; 0 gives q = 0.
    #[arg(long, allow_hyphen_values = true)]
    jump: Option<String>,
    /// Value on [0, c].
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Value on (c, π].
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Breakpoint, e.g. 1.2, pi/2, 2pi/3.
    #[arg(long)]
    c: Option<String>,
    /// Pieces as [[left, value], ...], left endpoints starting at 0.
    #[arg(long, allow_hyphen_values = true)]
    pieces: Option<String>,
    /// Index range: 3, 1..6, 1..=6 or 1,3,5.
    #[arg(long)]
    n: Option<String>,
    /// text, csv or json.
    #[arg(long)]
    format: Option<String>,
    /// key = value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SeriesArgs {
    /// Index radius.
    #[arg(long)]
    r: Option<String>,
    /// Series depth.
    #[arg(long)]
    s: Option<String>,
    /// Stopping tolerance of the iteration.
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<String>,
    #[arg(long = "max-iter")]
    max_iter: Option<String>,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run_command<I, T>(argv: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    CommandOutput { code: 0, stdout: text, stderr: String::new() }
                }
                _ => CommandOutput { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    match dispatch(cli.command) {
        Ok(stdout) => CommandOutput { code: 0, stdout, stderr: String::new() },
        Err(e) => {
            let code = exit_code(&e);
            let mut stderr = format!("error: {e}\n");
            if matches!(e, Error::Usage(_)) {
                stderr.push_str(SYNOPSIS);
                stderr.push('\n');
            }
            CommandOutput { code, stdout: String::new(), stderr }
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ConditionViolation { .. }
        | Error::Usage(_)
        | Error::Domain(_)
        | Error::NotTwoPiece { .. }
        | Error::Io(_) => 2,
        Error::NoConvergence { .. }
        | Error::IterateLeftWindow { .. }
        | Error::NoRootInWindow { .. }
        | Error::MultipleRoots { .. } => 1,
    }
}

/// Flag values layered over config-file values.
struct Settings(BTreeMap<String, String>);

impl Settings {
    fn new(config: Option<&PathBuf>, flags: &[(&str, &Option<String>)]) -> Result<Self> {
        let mut map = match config {
            Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
            None => BTreeMap::new(),
        };
        for (k, v) in flags {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        Ok(Self(map))
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::Usage(format!("invalid value `{v}` for --{key}")))
            })
            .transpose()
    }

    fn real(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| parse_real(v).map(|(x, _)| x)).transpose()
    }

    fn format(&self) -> Result<Format> {
        self.get("format").map_or(Ok(Format::Text), str::parse)
    }

    fn indices(&self, default: &str) -> Result<Vec<u32>> {
        parse_indices(self.get("n").unwrap_or(default))
    }

    fn series(&self, n: u32) -> Result<SeriesConfig> {
        let mut cfg = SeriesConfig::new(n);
        if let Some(r) = self.parse("r")? {
            cfg.r = r;
        }
        if let Some(s) = self.parse("s")? {
            cfg.s = s;
        }
        if let Some(t) = self.real("tol")? {
            cfg.tol = t;
        }
        if let Some(m) = self.parse("max-iter")? {
            cfg.max_iter = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn potential(&self) -> Result<StepPotential> {
        let has = |k: &str| self.get(k).is_some();
        if has("pieces") {
            if has("jump") || has("a") || has("b") || has("c") {
                return Err(Error::Usage("--pieces cannot be combined with --jump/--a/--b/--c".into()));
            }
            return parse_pieces(self.get("pieces").unwrap_or_default());
        }
        if has("jump") {
            if has("a") || has("b") {
                return Err(Error::Usage("use either --jump or --a/--b, not both".into()));
            }
            let jump = self.real("jump")?.unwrap_or_default();
            if jump == 0.0 {
                return Ok(StepPotential::zero());
            }
            let c = self.breakpoint()?;
            return make_kronig_penney(jump, c);
        }
        match (self.real("a")?, self.real("b")?) {
            (Some(a), Some(b)) => StepPotential::from_abc(a, b, self.breakpoint()?),
            (None, None) => Err(Error::Usage(
                "no potential given: use --jump J --c C, --a A --b B --c C, or --pieces".into(),
            )),
            _ => Err(Error::Usage("--a and --b must be given together".into())),
        }
    }

    fn breakpoint(&self) -> Result<Breakpoint> {
        let c = self
            .get("c")
            .ok_or_else(|| Error::Usage("--c is required".into()))?;
        parse_breakpoint(c)
    }
}

fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim().replace('_', "-");
        if !CONFIG_KEYS.contains(&k.as_str()) {
            return Err(Error::Usage(format!("config line {}: unknown key `{k}`", i + 1)));
        }
        let v = v.trim().trim_matches('"').to_string();
        map.insert(k, v);
    }
    Ok(map)
}

/// Parses `1.5`, `-1/2`, `pi`, `pi/2`, `2pi/3`, `2*pi/3`, `-pi/4`.
///
/// Returns the value and, for integer multiples of `π/den`, the exact ratio.
pub fn parse_real(s: &str) -> Result<(f64, Option<(i64, i64)>)> {
    let bad = || Error::Usage(format!("cannot parse number `{s}`"));
    let t: String = s.trim().to_lowercase().replace('π', "pi").chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(idx) = t.find("pi") {
        let head = t[..idx].trim_end_matches('*');
        let tail = &t[idx + 2..];
        let coef = match head {
            "" | "+" => "1",
            "-" => "-1",
            h => h,
        };
        let den = match tail {
            "" => "1",
            d => d.strip_prefix('/').ok_or_else(bad)?,
        };
        if let (Ok(num), Ok(den)) = (coef.parse::<i64>(), den.parse::<i64>()) {
            if den == 0 {
                return Err(bad());
            }
            return Ok((PI * num as f64 / den as f64, Some((num, den))));
        }
        let coef: f64 = coef.parse().map_err(|_| bad())?;
        let den: f64 = den.parse().map_err(|_| bad())?;
        return Ok((coef * PI / den, None));
    }
    if let Some((num, den)) = t.split_once('/') {
        let num: f64 = num.parse().map_err(|_| bad())?;
        let den: f64 = den.parse().map_err(|_| bad())?;
        if den == 0.0 {
            return Err(bad());
        }
        return Ok((num / den, None));
    }
    t.parse::<f64>().map(|v| (v, None)).map_err(|_| bad())
}

pub fn parse_breakpoint(s: &str) -> Result<Breakpoint> {
    Ok(match parse_real(s)? {
        (_, Some((num, den))) if den > 0 => Breakpoint::pi_ratio(num, den),
        (v, _) => Breakpoint::new(v),
    })
}

/// `3`, `1..6` (inclusive), `1..=6`, `1,3,5`.
pub fn parse_indices(s: &str) -> Result<Vec<u32>> {
    let bad = || Error::Usage(format!("cannot parse index range `{s}`"));
    let t = s.trim();
    let out: Vec<u32> = if let Some((lo, hi)) = t.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        (lo..=hi).collect()
    } else {
        t.split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if out.is_empty() || out.contains(&0) {
        return Err(Error::Usage(format!("indices must be ≥ 1, got `{s}`")));
    }
    Ok(out)
}

fn parse_pieces(s: &str) -> Result<StepPotential> {
    let bad = |why: &str| Error::Usage(format!("--pieces: {why}"));
    let v: Value = serde_json::from_str(s).map_err(|e| bad(&e.to_string()))?;
    let arr = v.as_array().ok_or_else(|| bad("expected [[left, value], ...]"))?;
    let mut lefts = Vec::new();
    let mut values = Vec::new();
    for item in arr {
        let pair = item
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| bad("each piece is [left, value]"))?;
        let num = |x: &Value| -> Result<String> {
            match x {
                Value::Number(n) => Ok(n.to_string()),
                Value::String(s) => Ok(s.clone()),
                _ => Err(bad("numbers or strings like \"pi/4\" expected")),
            }
        };
        lefts.push(parse_breakpoint(&num(&pair[0])?)?);
        values.push(parse_real(&num(&pair[1])?)?.0);
    }
    match lefts.first() {
        Some(first) if first.value() == 0.0 => {}
        _ => return Err(bad("first piece must start at 0")),
    }
    StepPotential::from_pieces(&lefts[1..], &values)
}

fn dispatch(cmd: Command) -> Result<String> {
    match cmd {
        Command::Estimate { common, series } => {
            let st = settings(&common, Some(&series), &[])?;
            estimate(&st)
        }
        Command::Oracle { common, tol } => {
            let st = settings(&common, None, &[("tol", &tol)])?;
            oracle(&st)
        }
        Command::Asymptotic { common, cutoff } => {
            let st = settings(&common, None, &[("cutoff", &cutoff)])?;
            asymptotic(&st)
        }
        Command::Compare { common, series } => {
            let st = settings(&common, Some(&series), &[])?;
            compare(&st)
        }
        Command::Sweep { common, column } => {
            let st = settings(&common, None, &[("column", &column)])?;
            sweep(&st)
        }
    }
}

fn settings(
    common: &CommonArgs,
    series: Option<&SeriesArgs>,
    extra: &[(&str, &Option<String>)],
) -> Result<Settings> {
    let mut flags: Vec<(&str, &Option<String>)> = vec![
        ("jump", &common.jump),
        ("a", &common.a),
        ("b", &common.b),
        ("c", &common.c),
        ("pieces", &common.pieces),
        ("n", &common.n),
        ("format", &common.format),
    ];
    if let Some(s) = series {
        flags.extend([("r", &s.r), ("s", &s.s), ("tol", &s.tol), ("max-iter", &s.max_iter)]);
    }
    flags.extend_from_slice(extra);
    Settings::new(common.config.as_ref(), &flags)
}

fn estimate(st: &Settings) -> Result<String> {
    let q = st.potential()?;
    let ns = st.indices("1..6")?;
    let format = st.format()?;
    check_all(&q, &ns)?;
    let cfgs = ns.iter().map(|&n| st.series(n)).collect::<Result<Vec<_>>>()?;
    let ests = with_thread_cap(|| cfgs.par_iter().map(|c| solve(&q, c)).collect::<Result<Vec<_>>>())?;
    let mut t = Table::new([
        "n", "value", "iterations", "residual", "window_lo", "window_hi", "lipschitz", "truncation_bound", "total_bound",
    ]);
    for e in &ests {
        let opt = |v: Option<f64>| v.map_or(NOT_APPLICABLE, Cell::Real);
        t.push(vec![
            e.n.into(),
            e.value.into(),
            e.iterations.into(),
            e.residual.into(),
            e.window.0.into(),
            e.window.1.into(),
            opt(e.budget.map(|b| b.lipschitz)),
            opt(e.budget.and_then(|b| b.truncation_bound)),
            opt(e.error_bound()),
        ]);
    }
    Ok(render(&t, format))
}

fn oracle(st: &Settings) -> Result<String> {
    let q = st.potential()?;
    let ns = st.indices("1..6")?;
    let format = st.format()?;
    let tol = st.real("tol")?.unwrap_or(report::ORACLE_TOL);
    check_all(&q, &ns)?;
    let rs = with_thread_cap(|| {
        ns.par_iter().map(|&n| find_eigenvalue(&q, n, tol)).collect::<Result<Vec<_>>>()
    })?;
    let mut t = Table::new(["n", "value", "bracket_lo", "bracket_hi", "residual", "bisection_steps"]);
    for r in &rs {
        t.push(vec![
            r.n.into(),
            r.value.into(),
            r.bracket.0.into(),
            r.bracket.1.into(),
            r.residual.into(),
            r.bisection_steps.into(),
        ]);
    }
    Ok(render(&t, format))
}

fn asymptotic(st: &Settings) -> Result<String> {
    let q = st.potential()?;
    let ns = st.indices("1..6")?;
    let format = st.format()?;
    let cutoff: Option<u64> = st.parse("cutoff")?;
    let mut cols = vec!["n", "thm2", "thm2_corrected", "sharp", "sharp_corrected"];
    if cutoff.is_some() {
        cols.push("eq8");
    }
    let rows = with_thread_cap(|| {
        ns.par_iter()
            .map(|&n| -> Result<Vec<Cell>> {
                let two = |r: Result<f64>| match r {
                    Ok(v) => Ok(Cell::Real(v)),
                    Err(Error::NotTwoPiece { .. }) => Ok(NOT_APPLICABLE),
                    Err(e) => Err(e),
                };
                let mut row = vec![
                    n.into(),
                    two(second_order_kp(&q, n))?,
                    two(second_order_kp_corrected(&q, n))?,
                    sharp_estimate(&q, n)?.into(),
                    sharp_estimate_corrected(&q, n)?.into(),
                ];
                if let Some(k) = cutoff {
                    row.push(eq8_estimate(&q, n, k)?.into());
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut t = Table::new(cols);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(render(&t, format))
}

fn compare(st: &Settings) -> Result<String> {
    let q = st.potential()?;
    let ns = st.indices("1..6")?;
    let format = st.format()?;
    let base = st.series(ns[0])?;
    let rows = report::compare(&q, &base, &ns)?;
    Ok(render(&report::comparison_table(&rows), format))
}

fn sweep(st: &Settings) -> Result<String> {
    let q = st.potential()?;
    let ns = st.indices("8..128")?;
    let format = st.format()?;
    let rows = report::sweep(&q, &ns)?;
    let mut t = report::sweep_table(&rows);
    if let Some(cols) = st.get("column") {
        let mut names = vec!["n"];
        names.extend(cols.split(',').map(str::trim).filter(|c| !c.is_empty() && *c != "n"));
        t = t.select(&names)?;
    }
    Ok(render(&t, format))
}
