//! Boundary operators and the two Green formula residuals.

use polylab::experiments::green_residuals;
use polylab::forms::boundary_operator_bt;

fn main() -> polylab::Result<()> {
    for t in 0..2 {
        print!("{}", boundary_operator_bt(2, t)?.to_text());
    }
    for m in [2, 3] {
        for dim in [2, 3] {
            let (flat, strong) = green_residuals(m, dim, 11)?;
            println!("m={m} N={dim}: flat {flat:.2e}, strong {strong:.2e}");
        }
    }
    Ok(())
}
