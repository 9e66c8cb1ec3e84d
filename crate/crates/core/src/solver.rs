//! Admissibility gate and the fixed-point solve `x_{i+1} = n² + g_n(x_i)`.

use std::fmt;

use serde::Serialize;

use crate::perturbation::{error_budget, in_window, window, ErrorBudget, SeriesConfig, SeriesEvaluator};
use crate::potential::StepPotential;
use crate::{Error, Result};

/// Result of testing `M ≤ 1/2` (n = 1) or `M < (2n-1)/2` (n > 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub n: u32,
    pub m: f64,
    pub admissible: bool,
    pub smallest_admissible_n: u32,
}

impl ConditionCheck {
    pub fn into_error(self) -> Error {
        Error::ConditionViolation {
            n: self.n,
            m: self.m,
            smallest_admissible: self.smallest_admissible_n,
        }
    }
}

impl fmt::Display for ConditionCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.admissible {
            write!(f, "n = {} admissible for M = {}", self.n, self.m)
        } else {
            write!(
                f,
                "n = {} not admissible for M = {}; smallest admissible n is {}",
                self.n, self.m, self.smallest_admissible_n
            )
        }
    }
}

fn admissible(m: f64, n: u32) -> bool {
    if n == 1 {
        m <= 0.5
    } else {
        m < (2 * n - 1) as f64 / 2.0
    }
}

/// Smallest `n` satisfying the gate for a given `M`.
pub fn smallest_admissible(m: f64) -> u32 {
    if m <= 0.5 {
        return 1;
    }
    // M < n - 1/2  ⇔  n > M + 1/2
    let mut n = (m + 0.5).floor().max(1.0) as u32;
    while !admissible(m, n) {
        n += 1;
    }
    n
}

pub fn check_condition(q: &StepPotential, n: u32) -> ConditionCheck {
    let m = q.max_abs();
    ConditionCheck {
        n,
        m,
        admissible: n >= 1 && admissible(m, n),
        smallest_admissible_n: smallest_admissible(m),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenvalueEstimate {
    pub n: u32,
    /// Final iterate `x_{n,i}`.
    pub value: f64,
    /// Number of map applications `i`.
    pub iterations: u32,
    /// `|K_n(value)|`.
    pub residual: f64,
    pub window: (f64, f64),
    /// Present for two-piece potentials.
    pub budget: Option<ErrorBudget>,
    /// `x_{n,0}, x_{n,1}, …`.
    pub history: Vec<f64>,
}

impl EigenvalueEstimate {
    /// `total_bound(iterations)` when defined.
    pub fn error_bound(&self) -> Option<f64> {
        self.budget.and_then(|b| b.total_bound(self.iterations))
    }
}

/// Iterates from `x_{n,0} = n²`.
pub fn solve(q: &StepPotential, cfg: &SeriesConfig) -> Result<EigenvalueEstimate> {
    let n2 = (cfg.n as f64).powi(2);
    solve_from(q, cfg, n2)
}

/// Iterates from an arbitrary start in `I_n`.
pub fn solve_from(q: &StepPotential, cfg: &SeriesConfig, x0: f64) -> Result<EigenvalueEstimate> {
    let eval = SeriesEvaluator::new(q, *cfg)?;
    let n = cfg.n;
    let n2 = (n as f64).powi(2);
    let (lo, hi) = window(q, n);
    let mut x = x0;
    let mut history = vec![x];
    let mut last_step = f64::INFINITY;
    for i in 1..=cfg.max_iter {
        if !in_window(q, n, x) {
            return Err(Error::IterateLeftWindow { n, x, lo, hi });
        }
        let next = n2 + eval.g(x)?.g;
        last_step = (next - x).abs();
        x = next;
        history.push(x);
        if last_step <= cfg.tol.max(4.0 * f64::EPSILON * x.abs()) {
            let residual = eval.g(x)?.k.abs();
            let budget = match error_budget(q, cfg) {
                Ok(b) => Some(b),
                Err(Error::NotTwoPiece { .. }) => None,
                Err(e) => return Err(e),
            };
            return Ok(EigenvalueEstimate {
                n,
                value: x,
                iterations: i,
                residual,
                window: (lo, hi),
                budget,
                history,
            });
        }
    }
    Err(Error::NoConvergence { max_iter: cfg.max_iter, last_step })
}
