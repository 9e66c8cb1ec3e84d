//! Dirichlet eigenvalues of `-y'' + q(x) y` on `[0, π]` for mean-zero step
//! (Kronig–Penney) potentials.
//!
//! Three independent routes are provided and meant to be compared:
//!
//! * [`solver`]: contraction fixed-point iteration `λ = n² + g_n(λ)` on the
//!   truncated perturbation series of [`perturbation`], with an a-priori
//!   error budget;
//! * [`asymptotics`]: the sharp large-`n` formulas, both through the general
//!   `D(n, f)` / `Q²`-integral pipeline and the Kronig–Penney closed forms;
//! * [`oracle`]: the exact characteristic function assembled from 2×2
//!   transfer matrices, solved by bracketed bisection.
//!
//! ```
//! use kp_dirichlet::{potential::{make_kronig_penney, Breakpoint}, perturbation::SeriesConfig};
//! use kp_dirichlet::{oracle, solver};
//!
//! let q = make_kronig_penney(1.0, Breakpoint::pi_ratio(1, 2))?;
//! let est = solver::solve(&q, &SeriesConfig::new(2))?;
//! let exact = oracle::find_eigenvalue(&q, 2, 1e-13)?;
//! assert!((est.value - exact.value).abs() < 1e-3);
//! # Ok::<(), kp_dirichlet::Error>(())
//! ```
// `!(x > 0.0)` style guards reject NaN as well; keep them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod oracle;
pub mod perturbation;
pub mod potential;
pub mod quadrature;
pub mod report;
pub mod solver;
pub mod sum;

pub use potential::{make_kronig_penney, Breakpoint, StepPotential};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "condition violated for n = {n}: M = {m} requires {} (smallest admissible n is {smallest_admissible})",
        if *n == 1 { "M ≤ 1/2".to_string() } else { format!("M < (2n-1)/2 = {}", (2 * n - 1) as f64 / 2.0) }
    )]
    ConditionViolation { n: u32, m: f64, smallest_admissible: u32 },

    #[error("operation needs a two-piece potential, got {pieces} pieces")]
    NotTwoPiece { pieces: usize },

    #[error("no convergence after {max_iter} iterations (last step {last_step:e})")]
    NoConvergence { max_iter: u32, last_step: f64 },

    #[error("iterate {x} left the window [{lo}, {hi}] for n = {n}")]
    IterateLeftWindow { n: u32, x: f64, lo: f64, hi: f64 },

    #[error("no sign change of the characteristic function in [{lo}, {hi}] for n = {n}")]
    NoRootInWindow { n: u32, lo: f64, hi: f64 },

    #[error("{count} sign changes of the characteristic function in the window for n = {n}")]
    MultipleRoots { n: u32, count: usize },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
