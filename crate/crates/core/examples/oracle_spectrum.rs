//! Transfer-matrix spectrum of an asymmetric step, skipping indices whose window is too narrow.

use kp_dirichlet::oracle::spectrum_up_to;
use kp_dirichlet::{Breakpoint, StepPotential};

fn main() -> kp_dirichlet::Result<()> {
    let q = StepPotential::from_abc(-4.0 / 3.0, 2.0 / 3.0, Breakpoint::pi_ratio(1, 3))?;
    let s = spectrum_up_to(&q, 10, 1e-13)?;
    if let Some(note) = &s.diagnostic {
        println!("{note}");
    }
    for e in &s.eigenvalues {
        let n2 = (e.n * e.n) as f64;
        println!(
            "n={:>2}  λ={:.13}  λ-n²={:+.6e}  |f|={:.1e}  steps={}",
            e.n, e.value, e.value - n2, e.residual, e.bisection_steps
        );
    }
    Ok(())
}
