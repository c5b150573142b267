//! Reduction of the Riccati problem to `t^r Σ A_i(t)(δ+m)^i u = x M`, and
//! the round-trip check that re-expands it.

use exoseries::corpus;
use exoseries::error::Result;
use exoseries::pipeline::{reduce_stage, to_json};
use exoseries::reduction::{check_hypotheses, round_trip_defect};
use exoseries::scalar::Backend;

fn main() -> Result<()> {
    let (f, phi) = corpus::RICCATI.load(Backend::Exact)?;
    let h = check_hypotheses(&f, &phi, 12, 24)?;
    let (choice, eq) = reduce_stage(&f, &phi, &h)?;
    println!("m = {} (m_min = {}), indicial roots {:?}", choice.m, choice.m_min, choice.roots);
    println!("r = {}, e = {}, N = {}", eq.r, eq.e, eq.n_x);
    for (i, a) in eq.a.iter().enumerate() {
        println!("A_{i}(t) = {a}");
    }
    for (q, c) in eq.m_series.terms() {
        println!("M: u^{q:?} * ({c})");
    }
    let defect = round_trip_defect(&f, &phi, &eq)?;
    println!("round-trip defect is zero: {}", defect.is_zero());
    println!("{}", to_json(&eq.to_record())?);
    Ok(())
}
