//! A three-piece potential: the fixed point and the oracle both accept it,
//! while the two-piece formulas refuse.

use kp_dirichlet::asymptotics::second_order_kp;
use kp_dirichlet::oracle::find_eigenvalue;
use kp_dirichlet::perturbation::SeriesConfig;
use kp_dirichlet::solver::{smallest_admissible, solve};
use kp_dirichlet::{Breakpoint, StepPotential};

fn main() -> kp_dirichlet::Result<()> {
    let q = StepPotential::from_pieces(&[Breakpoint::pi_ratio(1, 4), Breakpoint::pi_ratio(1, 2)], &[1.0, -3.0, 1.0])?;
    let first = smallest_admissible(q.max_abs());
    println!("M = {}, first admissible n = {first}", q.max_abs());
    for n in first..first + 4 {
        let est = solve(&q, &SeriesConfig::new(n))?;
        let exact = find_eigenvalue(&q, n, 1e-13)?.value;
        println!("n={n}  fixed point={:.10}  exact={exact:.10}", est.value);
    }
    match second_order_kp(&q, first) {
        Err(e) => println!("second-order formula: {e}"),
        Ok(v) => println!("unexpected: {v}"),
    }
    Ok(())
}
