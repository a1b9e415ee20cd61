//! Chain rule on jets: compose a ridge sum with a quadratic map and compare
//! against finite differences.

use polylab::tensor_calculus::*;

fn main() -> polylab::Result<()> {
    let outer = RidgeSum::new(2)
        .with(RidgeKind::Exp, 0.8, vec![0.6, -0.4])
        .with(RidgeKind::Sin { phase: 0.2 }, 1.1, vec![0.3, 0.9]);
    let term = |a: usize, b: usize, c: f64| (MultiIndex::new(vec![a, b]), c);
    let inner = [
        Polynomial::new(2, vec![term(1, 0, 1.0), term(0, 2, 0.5)]),
        Polynomial::new(2, vec![term(0, 1, 1.0), term(1, 1, -0.3)]),
    ];
    let x = [0.2, -0.1];
    let phi: Vec<f64> = inner.iter().map(|q| q.eval(&x)).collect();
    let inner_jets: Vec<DerivativeTable> = inner.iter().map(|q| q.jet(&x, 4)).collect();
    let exact = compose_jets(&outer.jet(&phi, 4), &inner_jets)?;

    let composed = |y: &[f64]| {
        let p: Vec<f64> = inner.iter().map(|q| q.eval(y)).collect();
        outer.value(&p)
    };
    let fd = finite_difference_jet(&composed, &x, 4);
    println!("value           {:.12}", exact.value());
    println!("max |jet - fd|  {:.2e}", exact.max_abs_diff(&fd));

    let audit = polylab::experiments::derivative_audit(3, 50, 20)?;
    println!("random audit    {audit:?}");
    Ok(())
}
