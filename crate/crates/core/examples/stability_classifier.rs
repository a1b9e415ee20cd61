//! Stability regimes in the oscillation exponent and the `h_eps` rates.

use polylab::experiments::{h_eps_slope, H_EPS_FAMILY};
use polylab::geometry::classify_stability;

fn main() -> polylab::Result<()> {
    for m in [2, 3] {
        for alpha in [0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
            let v = classify_stability(m, m - 1, alpha)?;
            println!("m={m} alpha={alpha:<4} threshold {:<4} {:?}", v.threshold, v.regime);
        }
    }
    for alpha in [1.0, 2.0] {
        let s: Vec<String> =
            (0..=2).map(|l| h_eps_slope(alpha, l, &H_EPS_FAMILY).map(|s| format!("{s:.3}"))).collect::<Result<_, _>>()?;
        println!("alpha={alpha}: slopes of |D^l h_eps| for l=0..2: {}", s.join(" "));
    }
    Ok(())
}
