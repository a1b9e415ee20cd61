//! The cell constant `K` for `b = 2 + cos y` and its mode split.

use polylab::experiments::run_cell_report;

fn main() -> polylab::Result<()> {
    for m in [2, 3] {
        let r = run_cell_report(m, "2+cos")?;
        println!("m={m}  K = {:.10}", r.k_value);
        if m == 2 {
            println!("      6 pi^3 = {:.10}", 6.0 * std::f64::consts::PI.powi(3));
        }
        if let Some(t) = &r.truncation {
            println!("      truncated strip relative error {:.2e}", t.relative_error);
        }
    }
    print!("{}", run_cell_report(2, "2+cos+0.5sin2")?.to_csv());
    Ok(())
}
