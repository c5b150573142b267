//! The constant `σ = inf |L(k + m + (ℓ - kr)iη)|` over the lattice `k ≥ 1, ℓ ≥ 0`.

use exoseries::error::Result;
use exoseries::majorant::compute_sigma;
use exoseries::scalar::Complex64;

fn main() -> Result<()> {
    let c = Complex64::new;
    let cases = [
        ("z", vec![c(0.0, 0.0), c(1.0, 0.0)], 1, 0, 1.0),
        ("z - 1/2", vec![c(-0.5, 0.0), c(1.0, 0.0)], 1, 0, 1.0),
        ("z^2", vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1, 0, 1.0),
        ("z - (1-i), r = 2", vec![c(-1.0, 1.0), c(1.0, 0.0)], 1, 2, 1.0),
        ("z - (40.3 + 0.2i)", vec![c(-40.3, -0.2), c(1.0, 0.0)], 1, 1, 0.5),
    ];
    for (name, l, m, r, eta) in cases {
        let s = compute_sigma(&l, m, r, eta, 20, 20)?;
        println!(
            "L = {name:20} sigma = {:.6}  at (k, l) = {:?}, certified beyond |z| > {:.3}, {} lattice points",
            s.sigma, s.argmin, s.radius, s.evaluated
        );
    }
    match compute_sigma(&[c(-3.0, 0.0), c(1.0, 0.0)], 1, 0, 1.0, 20, 20) {
        Err(e) => println!("L = z - 3: {e}"),
        Ok(s) => println!("unexpected sigma {}", s.sigma),
    }
    Ok(())
}
