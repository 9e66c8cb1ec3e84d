//! Large-n formulas compared with the exact eigenvalues, residuals scaled by n³.

use kp_dirichlet::asymptotics::{second_order_kp, second_order_kp_corrected, sharp_estimate_corrected};
use kp_dirichlet::oracle::find_eigenvalue;
use kp_dirichlet::{make_kronig_penney, Breakpoint};

fn main() -> kp_dirichlet::Result<()> {
    let q = make_kronig_penney(1.0, Breakpoint::pi_ratio(1, 3))?;
    println!("{:>4}  {:>12}  {:>12}  {:>12}", "n", "second", "corrected", "sharp");
    for n in [8, 16, 32, 64, 128] {
        let exact = find_eigenvalue(&q, n, 1e-12)?.value;
        let scale = (n as f64).powi(3);
        let r = |v: f64| scale * (exact - v).abs();
        println!(
            "{n:>4}  {:>12.6}  {:>12.6}  {:>12.6}",
            r(second_order_kp(&q, n)?),
            r(second_order_kp_corrected(&q, n)?),
            r(sharp_estimate_corrected(&q, n)?),
        );
    }
    Ok(())
}
