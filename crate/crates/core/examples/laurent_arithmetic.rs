//! Truncated Laurent series in `t`: products, inverses and truncation
//! bookkeeping in the exact and float backends.

use exoseries::error::Result;
use exoseries::laurent::{LaurentSeries, Trunc};
use exoseries::scalar::Backend;

fn main() -> Result<()> {
    let e = Backend::Exact;
    // a = t^-1 + 2 + O(t^3), b = 1 - t (exact)
    let a = LaurentSeries::from_coeffs(e, -1, vec![e.int(1), e.int(2)], Trunc::At(3))?;
    let b = LaurentSeries::from_coeffs(e, 0, vec![e.int(1), e.int(-1)], Trunc::Exact)?;
    println!("a       = {a}");
    println!("b       = {b}");
    println!("a * b   = {}", a.mul(&b)?);
    println!("1 / b   = {}", b.invert_to(6)?);
    println!("a^3     = {}", a.pow(3)?);
    println!("theta b = {}", b.theta());

    let f = Backend::float(128)?;
    let af = a.convert(f);
    let inv = af.invert()?;
    println!("1 / a (128-bit) = {inv}");
    println!("a * (1/a)       = {}", af.mul(&inv)?);
    Ok(())
}
