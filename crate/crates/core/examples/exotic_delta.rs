//! Exotic series `Σ α_k(t) x^k` with `t = x^{iη}`: products, powers and the
//! Euler operator `δ = x d/dx`, which multiplies `t^j x^k` by `k + iηj`.

use exoseries::error::Result;
use exoseries::exotic::{make_jet, ExoticSeries};
use exoseries::laurent::{LaurentSeries, Trunc};
use exoseries::scalar::Backend;

fn main() -> Result<()> {
    let e = Backend::Exact;
    let eta = e.parse_real("1/2")?;
    // φ = t + t^-1 x + O(x^3)
    let phi = ExoticSeries::from_grades(
        &eta,
        Trunc::At(2),
        [
            (0, LaurentSeries::monomial(e.int(1), 1, Trunc::Exact)),
            (1, LaurentSeries::monomial(e.int(1), -1, Trunc::Exact)),
        ],
    )?;
    println!("phi         = {phi}");
    println!("delta phi   = {}", phi.delta()?);
    println!("phi^2       = {}", phi.pow(2)?);
    println!("(delta+1)^2 = {}", phi.delta_shift(1)?.delta_shift(1)?);
    let jet = make_jet(&phi, 2)?;
    for (i, c) in jet.components().iter().enumerate() {
        println!("jet[{i}]      = {c}");
    }
    let lhs = phi.mul(&phi.delta()?)?.delta()?;
    let rhs = phi.delta()?.pow(2)?.add(&phi.mul(&phi.delta()?.delta()?)?)?;
    println!("delta(phi * delta phi) == (delta phi)^2 + phi delta^2 phi: {}", lhs == rhs);
    Ok(())
}
