//! Builds the comparison table through the library and renders it in every format.

use kp_dirichlet::perturbation::SeriesConfig;
use kp_dirichlet::report::{compare, comparison_table, render, Format};
use kp_dirichlet::{make_kronig_penney, Breakpoint};

fn main() -> kp_dirichlet::Result<()> {
    let q = make_kronig_penney(1.0, Breakpoint::pi_ratio(1, 2))?;
    let rows = compare(&q, &SeriesConfig::new(1), &[1, 2, 3])?;
    let table = comparison_table(&rows);
    for f in [Format::Text, Format::Csv, Format::Json] {
        println!("{}", render(&table.select(&["n", "fixed_point", "oracle"])?, f));
    }
    Ok(())
}
