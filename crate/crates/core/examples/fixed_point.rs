//! Fixed-point estimates for a unit step at π/2, printed next to the exact eigenvalues.

use kp_dirichlet::oracle::find_eigenvalue;
use kp_dirichlet::perturbation::SeriesConfig;
use kp_dirichlet::solver::solve;
use kp_dirichlet::{make_kronig_penney, Breakpoint};

fn main() -> kp_dirichlet::Result<()> {
    let q = make_kronig_penney(1.0, Breakpoint::pi_ratio(1, 2))?;
    println!("{:>2}  {:>16}  {:>16}  {:>5}  {:>10}", "n", "fixed point", "exact", "iters", "|diff|");
    for n in 1..=6 {
        let est = solve(&q, &SeriesConfig::new(n))?;
        let exact = find_eigenvalue(&q, n, 1e-13)?.value;
        println!(
            "{n:>2}  {:>16.12}  {:>16.12}  {:>5}  {:>10.3e}",
            est.value,
            exact,
            est.iterations,
            (est.value - exact).abs()
        );
    }
    Ok(())
}
