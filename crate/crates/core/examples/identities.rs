//! The second-order series coefficient three ways: truncated double sum,
//! integral identity, and the step-potential closed forms.

use kp_dirichlet::asymptotics::{b_integral, d_parts, direct_series_a1b1, kp_closed_forms, a1_identity_corrected};
use kp_dirichlet::{make_kronig_penney, Breakpoint};

fn main() -> kp_dirichlet::Result<()> {
    let q = make_kronig_penney(1.0, Breakpoint::new(1.1))?;
    for n in [2, 5, 9] {
        let (a, b) = direct_series_a1b1(&q, n, 200_000)?;
        let ident = a1_identity_corrected(&q, n)?;
        println!("n={n}  A series={a:+.12}  A identity={ident:+.12}  B series={b:+.12}  B exact={:+.12}", b_integral(&q, n)?);

        let quad = d_parts(&q, &q, n)?;
        let closed = kp_closed_forms(&q, n)?;
        println!("      D1 quadrature={:+.12}  D1 closed form={:+.12}", quad.d1.re, closed.d1q);
    }
    Ok(())
}
