//! Truncated perturbation series and the fixed-point map `g_n`.
//!
//! For a spectral index `n`, radius `r` and depth `s`,
//!
//! ```text
//! a_{r,k,n}(λ) = Σ_{n_1..n_k ∈ [-r, r]}  C_{n_1}⋯C_{n_k} (C_{P_k} - C_{P_k + 2n})
//!                                         / Π_j [λ - (n + P_j)²]
//! g_n(λ)       = -C_{2n} + Σ_{k=1}^{s} a_{r,k,n}(λ)
//! K_n(λ)       = λ - n² - g_n(λ)
//! ```
//!
//! where `P_j = n_1 + … + n_j` and tuples with any `P_j ∈ {0, -2n}` are
//! skipped. Exclusion is applied per prefix while enumerating, so whole
//! subtrees are pruned.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::potential::StepPotential;
use crate::solver::check_condition;
use crate::sum::NeumaierSum;
use crate::{Error, Result};

/// Relative slack allowed when testing `λ ∈ I_n`.
const WINDOW_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesConfig {
    /// Spectral index.
    pub n: u32,
    /// Index radius: every `n_j ∈ [-r, r]`.
    pub r: u32,
    /// Series depth.
    pub s: u32,
    pub tol: f64,
    pub max_iter: u32,
}

impl SeriesConfig {
    pub const DEFAULT_R: u32 = 5;
    pub const DEFAULT_S: u32 = 5;
    pub const DEFAULT_TOL: f64 = 1e-15;
    pub const DEFAULT_MAX_ITER: u32 = 50;

    pub fn new(n: u32) -> Self {
        Self {
            n,
            r: Self::DEFAULT_R,
            s: Self::DEFAULT_S,
            tol: Self::DEFAULT_TOL,
            max_iter: Self::DEFAULT_MAX_ITER,
        }
    }

    pub fn with_radius(mut self, r: u32) -> Self {
        self.r = r;
        self
    }

    pub fn with_depth(mut self, s: u32) -> Self {
        self.s = s;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: u32) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        if self.r == 0 || self.s == 0 {
            return Err(Error::Domain("r and s must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Domain(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Domain("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// `I_n = [n² - M, n² + M]`.
pub fn window(q: &StepPotential, n: u32) -> (f64, f64) {
    let n2 = (n as f64).powi(2);
    let m = q.max_abs();
    (n2 - m, n2 + m)
}

pub(crate) fn in_window(q: &StepPotential, n: u32, x: f64) -> bool {
    let (lo, hi) = window(q, n);
    let slack = WINDOW_SLACK * hi.abs().max(1.0);
    x >= lo - slack && x <= hi + slack
}

/// One evaluation of `g_n` with its by-products.
#[derive(Clone, Debug, PartialEq)]
pub struct GValue {
    /// `g_n(λ)`.
    pub g: f64,
    /// `K_n(λ) = λ - n² - g_n(λ)`.
    pub k: f64,
    /// `a_{r,k,n}(λ)` for `k = 1..=s`.
    pub depth_terms: Vec<f64>,
    /// Smallest `|λ - (n + P_j)²|` met over all evaluated terms.
    pub min_denominator: f64,
}

/// Evaluates the truncated series for a fixed potential and configuration.
///
/// Cosine coefficients are tabulated once; reuse one evaluator across the
/// iterates of a solve.
#[derive(Clone, Debug)]
pub struct SeriesEvaluator<'a> {
    q: &'a StepPotential,
    cfg: SeriesConfig,
    // C_k for k in [-offset, offset]
    coeffs: Vec<f64>,
    offset: i64,
}

impl<'a> SeriesEvaluator<'a> {
    pub fn new(q: &'a StepPotential, cfg: SeriesConfig) -> Result<Self> {
        cfg.validate()?;
        let check = check_condition(q, cfg.n);
        if !check.admissible {
            return Err(check.into_error());
        }
        let offset = (cfg.r as i64) * (cfg.s as i64) + 2 * cfg.n as i64;
        let coeffs = (-offset..=offset).map(|k| q.cosine_coeff(k)).collect();
        Ok(Self { q, cfg, coeffs, offset })
    }

    pub fn config(&self) -> &SeriesConfig {
        &self.cfg
    }

    pub fn potential(&self) -> &StepPotential {
        self.q
    }

    #[inline]
    fn c(&self, k: i64) -> f64 {
        self.coeffs[(k + self.offset) as usize]
    }

    fn check_lambda(&self, lambda: f64) -> Result<()> {
        if !in_window(self.q, self.cfg.n, lambda) {
            let (lo, hi) = window(self.q, self.cfg.n);
            return Err(Error::Domain(format!(
                "λ = {lambda} outside I_{} = [{lo}, {hi}]",
                self.cfg.n
            )));
        }
        Ok(())
    }

    /// `a_{r,k,n}(λ)` for `1 ≤ k ≤ s`.
    pub fn a_trunc(&self, lambda: f64, k: u32) -> Result<f64> {
        if k == 0 || k > self.cfg.s {
            return Err(Error::Domain(format!("depth k = {k} outside 1..={}", self.cfg.s)));
        }
        self.check_lambda(lambda)?;
        let mut min_den = f64::INFINITY;
        Ok(self.depth_sum(lambda, k, &mut min_den))
    }

    fn depth_sum(&self, lambda: f64, k: u32, min_den: &mut f64) -> f64 {
        let mut acc = NeumaierSum::new();
        self.walk(lambda, k, 1, 0, 1.0, &mut acc, min_den);
        acc.sum()
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        lambda: f64,
        k: u32,
        depth: u32,
        partial: i64,
        prod: f64,
        acc: &mut NeumaierSum,
        min_den: &mut f64,
    ) {
        let n = self.cfg.n as i64;
        let r = self.cfg.r as i64;
        for m in -r..=r {
            let cm = self.c(m);
            if cm == 0.0 {
                continue;
            }
            let p = partial + m;
            if p == 0 || p == -2 * n {
                continue;
            }
            let shifted = (n + p) as f64;
            let den = lambda - shifted * shifted;
            *min_den = min_den.min(den.abs());
            let term = prod * cm / den;
            if depth == k {
                *acc += term * (self.c(p) - self.c(p + 2 * n));
            } else {
                self.walk(lambda, k, depth + 1, p, term, acc, min_den);
            }
        }
    }

    /// `g_n(λ)` together with `K_n(λ)` and the per-depth terms.
    pub fn g(&self, lambda: f64) -> Result<GValue> {
        self.check_lambda(lambda)?;
        let n = self.cfg.n as i64;
        let mut min_den = f64::INFINITY;
        let depth_terms: Vec<f64> = (1..=self.cfg.s)
            .map(|k| self.depth_sum(lambda, k, &mut min_den))
            .collect();
        let mut total = NeumaierSum::new();
        total += -self.c(2 * n);
        for t in &depth_terms {
            total += *t;
        }
        let g = total.sum();
        let n2 = (n * n) as f64;
        debug_assert!(
            min_den.is_infinite()
                || min_den >= (2 * n - 1) as f64 - self.q.max_abs() - 1e-9 * n2.max(1.0),
            "denominator {min_den} below 2n-1-M"
        );
        Ok(GValue {
            g,
            k: lambda - n2 - g,
            depth_terms,
            min_denominator: min_den,
        })
    }
}

/// `a_{r,k,n}(λ)`.
pub fn a_trunc(q: &StepPotential, lambda: f64, cfg: &SeriesConfig, k: u32) -> Result<f64> {
    SeriesEvaluator::new(q, *cfg)?.a_trunc(lambda, k)
}

/// `g_n(λ)` and `K_n(λ)`.
pub fn g_n(q: &StepPotential, lambda: f64, cfg: &SeriesConfig) -> Result<GValue> {
    SeriesEvaluator::new(q, *cfg)?.g(lambda)
}

/// A-priori error budget for the fixed-point estimate of one eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorBudget {
    /// Contraction constant `L_n` claimed for `g_n` on `I_n`.
    pub lipschitz: f64,
    /// Bound on `|λ_n - ρ_n|`; `None` when its radius term has a nonpositive denominator.
    pub truncation_bound: Option<f64>,
    /// Depth part of the truncation bound (series cut at `s`).
    pub depth_term: f64,
    /// Radius part of the truncation bound (indices cut at `r`).
    pub radius_term: Option<f64>,
    /// Bound on `|x_{n,0} - ρ_n|` for the start `x_{n,0} = n²`.
    pub initial_gap_bound: f64,
}

impl ErrorBudget {
    /// Bound on `|x_{n,i} - ρ_n|`.
    pub fn iteration_bound(&self, i: u32) -> f64 {
        self.lipschitz.powi(i as i32) * self.initial_gap_bound
    }

    /// Bound on `|λ_n - x_{n,i}|`.
    pub fn total_bound(&self, i: u32) -> Option<f64> {
        self.truncation_bound.map(|t| t + self.iteration_bound(i))
    }
}

/// Error budget of the two-piece potential `q` at `cfg.n`, `cfg.r`, `cfg.s`.
pub fn error_budget(q: &StepPotential, cfg: &SeriesConfig) -> Result<ErrorBudget> {
    cfg.validate()?;
    let check = check_condition(q, cfg.n);
    if !check.admissible {
        return Err(check.into_error());
    }
    let jump = q
        .jump()
        .ok_or(Error::NotTwoPiece { pieces: q.num_pieces() })?;
    if jump == 0.0 {
        return Ok(ErrorBudget {
            lipschitz: 0.0,
            truncation_bound: Some(0.0),
            depth_term: 0.0,
            radius_term: Some(0.0),
            initial_gap_bound: 0.0,
        });
    }
    let n = cfg.n as f64;
    let m = q.max_abs();
    let d = 2.0 * n - 1.0 - m;
    let ba = jump;

    let lipschitz = 9.0 * ba * ba / (4.0 * PI * d * (4.0 * PI * d - 3.0 * ba));
    let one_minus_l = 1.0 - lipschitz;

    let s = cfg.s as i32;
    let depth_term = ba.powi(s + 2)
        / (2.0 * m * SQRT_2.powi(s) * PI.powi(s + 1) * d.powi(s) * (SQRT_2 * PI * d - ba) * one_minus_l);

    let r1 = cfg.r as f64 + 1.0;
    let radius_den = r1 * (r1 - 2.0 * n).abs() - m;
    let radius_term = (radius_den > 0.0)
        .then(|| 8.0 * ba * ba / (PI * PI * r1 * r1 * radius_den * one_minus_l));

    let n1 = 2.0 * n - 1.0;
    let initial_gap_bound = (ba / (2.0 * PI * n)
        + ba * ba / (m * PI * PI * n1)
        + ba.powi(3) / (2.0 * SQRT_2 * m * PI * PI * n1 * (SQRT_2 * PI * n1 - ba)))
        / one_minus_l;

    Ok(ErrorBudget {
        lipschitz,
        truncation_bound: radius_term.map(|rt| depth_term + rt),
        depth_term,
        radius_term,
        initial_gap_bound,
    })
}
