//! Exact characteristic function from per-piece transfer matrices.
//!
//! On a piece of length `t` with value `v`, set `z = λ - v`. The solution of
//! `-y'' + v y = λ y` propagates by
//!
//! ```text
//! [y ]     [ c(z,t)     s(z,t) ] [y ]
//! [y']  ←  [ -z s(z,t)  c(z,t) ] [y']
//! ```
//!
//! with `s = sin(√z t)/√z`, `c = cos(√z t)` (hyperbolic for `z < 0`, Taylor
//! near `z = 0`). Starting from `y(0) = 0, y'(0) = 1`, the eigenvalues are the
//! zeros of `f(λ) = y(π)`.

use serde::Serialize;

use crate::perturbation::window;
use crate::potential::StepPotential;
use crate::solver::check_condition;
use crate::{Error, Result};

/// Below this `|z| t²` the Taylor branch is used.
pub const SERIES_SWITCH: f64 = 1e-8;

/// Sign-scan samples across the window.
const SCAN_POINTS: usize = 64;

/// Absolute widening of `I_n` before scanning; keeps roots at the ends inside.
const WINDOW_PAD: f64 = 1e-9;

/// `(s(z,t), c(z,t))`.
pub fn propagator(z: f64, t: f64) -> (f64, f64) {
    if z.abs() * t * t < SERIES_SWITCH {
        let zt2 = z * t * t;
        let s = t * (1.0 - zt2 / 6.0 + zt2 * zt2 / 120.0);
        let c = 1.0 - zt2 / 2.0 + zt2 * zt2 / 24.0;
        (s, c)
    } else if z > 0.0 {
        let w = z.sqrt();
        ((w * t).sin() / w, (w * t).cos())
    } else {
        let w = (-z).sqrt();
        ((w * t).sinh() / w, (w * t).cosh())
    }
}

/// `(y(π), y'(π))` for the Dirichlet start at `x = 0`.
pub fn shoot(q: &StepPotential, lambda: f64) -> (f64, f64) {
    let (mut y, mut dy) = (0.0_f64, 1.0_f64);
    for (l, r, v) in q.pieces() {
        let z = lambda - v;
        let (s, c) = propagator(z, r.value() - l.value());
        (y, dy) = (c * y + s * dy, -z * s * y + c * dy);
    }
    (y, dy)
}

/// `f(λ) = y(π)`.
pub fn characteristic(q: &StepPotential, lambda: f64) -> f64 {
    shoot(q, lambda).0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub n: u32,
    pub value: f64,
    /// Final bisection bracket.
    pub bracket: (f64, f64),
    /// `|f(value)|`.
    pub residual: f64,
    pub bisection_steps: u32,
}

/// The eigenvalue in `I_n`, to absolute tolerance `tol`.
pub fn find_eigenvalue(q: &StepPotential, n: u32, tol: f64) -> Result<OracleResult> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let (lo, hi) = window(q, n);
    let (lo, hi) = (lo - WINDOW_PAD, hi + WINDOW_PAD);

    let xs: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| characteristic(q, x)).collect();

    let mut brackets = Vec::new();
    for i in 0..SCAN_POINTS - 1 {
        if fs[i] == 0.0 {
            brackets.push((xs[i], xs[i]));
        } else if fs[i] * fs[i + 1] < 0.0 {
            brackets.push((xs[i], xs[i + 1]));
        }
    }
    if fs[SCAN_POINTS - 1] == 0.0 {
        brackets.push((hi, hi));
    }
    let (mut a, mut b) = match brackets.as_slice() {
        [] => return Err(Error::NoRootInWindow { n, lo, hi }),
        [one] => *one,
        many => return Err(Error::MultipleRoots { n, count: many.len() }),
    };

    let mut fa = characteristic(q, a);
    let mut steps = 0;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = characteristic(q, mid);
        steps += 1;
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    // one secant step inside the final bracket, keep the best candidate
    let mid = 0.5 * (a + b);
    let fb = characteristic(q, b);
    let mut candidates = vec![a, b, mid];
    if fb != fa {
        let s = a - fa * (b - a) / (fb - fa);
        if s >= a && s <= b {
            candidates.push(s);
        }
    }
    let (value, residual) = candidates
        .into_iter()
        .map(|x| (x, characteristic(q, x).abs()))
        .fold((mid, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best });
    Ok(OracleResult {
        n,
        value,
        bracket: (a, b),
        residual,
        bisection_steps: steps,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<OracleResult>,
    /// Indices below the smallest admissible one, not computed.
    pub skipped: Vec<u32>,
    pub diagnostic: Option<String>,
}

/// Eigenvalues for `n = 1..=n_max`, skipping indices where `I_n` is not
/// guaranteed to isolate a single eigenvalue.
pub fn spectrum_up_to(q: &StepPotential, n_max: u32, tol: f64) -> Result<Spectrum> {
    let first = check_condition(q, 1).smallest_admissible_n;
    let skipped: Vec<u32> = (1..first.min(n_max + 1)).collect();
    let diagnostic = (!skipped.is_empty()).then(|| {
        format!(
            "skipped n < {first}: M = {} is too large for the window to isolate them",
            q.max_abs()
        )
    });
    let eigenvalues = (first..=n_max)
        .map(|n| find_eigenvalue(q, n, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum { eigenvalues, skipped, diagnostic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{make_kronig_penney, Breakpoint};

    #[test]
    fn unimodular() {
        for z in [-50.0, -1.0, -1e-10, 0.0, 1e-12, 0.3, 17.0, 400.0] {
            for t in [1e-3, 0.5, 1.0, 2.0] {
                let (s, c) = propagator(z, t);
                let scale = c * c + z.abs() * s * s;
                assert!((c * c + z * s * s - 1.0).abs() < 1e-15 * scale.max(1e3), "z={z} t={t}");
            }
        }
    }

    #[test]
    fn branches_meet_at_switch() {
        let t = 1.0;
        for z in [SERIES_SWITCH, -SERIES_SWITCH] {
            let below = propagator(z * (1.0 - 1e-9), t);
            let above = propagator(z * (1.0 + 1e-9), t);
            assert!((below.0 - above.0).abs() < 1e-10);
            assert!((below.1 - above.1).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_potential_spectrum() {
        let q = StepPotential::zero();
        for n in 1..=20u32 {
            let r = find_eigenvalue(&q, n, 1e-13).unwrap();
            assert!((r.value - (n * n) as f64).abs() < 1e-12, "{n}: {}", r.value);
        }
    }

    #[test]
    fn unit_step_ground_state() {
        let q = make_kronig_penney(1.0, Breakpoint::pi_ratio(1, 2)).unwrap();
        let r = find_eigenvalue(&q, 1, 1e-14).unwrap();
        assert!((r.value - 0.938591690643622).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn spectrum_skips_inadmissible() {
        let q = make_kronig_penney(6.0, Breakpoint::pi_ratio(1, 2)).unwrap();
        let s = spectrum_up_to(&q, 6, 1e-12).unwrap();
        assert_eq!(s.skipped, vec![1, 2, 3]);
        assert_eq!(s.eigenvalues.len(), 3);
        assert!(s.diagnostic.unwrap().contains("n < 4"));
    }
}
