//! The a-priori error budget against the observed error of each estimate.
//!
//! The stated contraction constant only holds in the first window, so the bound
//! is not reliable for larger n; this prints both so the gap is visible.

use kp_dirichlet::oracle::find_eigenvalue;
use kp_dirichlet::perturbation::{error_budget, SeriesConfig};
use kp_dirichlet::solver::solve;
use kp_dirichlet::{make_kronig_penney, Breakpoint};

fn main() -> kp_dirichlet::Result<()> {
    let q = make_kronig_penney(1.0, Breakpoint::pi_ratio(1, 2))?;
    for n in 1..=6 {
        let cfg = SeriesConfig::new(n);
        let b = error_budget(&q, &cfg)?;
        let est = solve(&q, &cfg)?;
        let observed = (find_eigenvalue(&q, n, 1e-13)?.value - est.value).abs();
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.3e}"));
        println!(
            "n={n}  L={:.4}  depth={:.2e}  radius={:>9}  total={:>9}  observed={observed:.3e}",
            b.lipschitz,
            b.depth_term,
            fmt(b.radius_term),
            fmt(est.error_bound()),
        );
    }
    Ok(())
}
