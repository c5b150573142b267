//! The majorant series of the Riccati problem, its entrywise dominance over
//! the true coefficients, the bound on the right side and the certified radius.

use exoseries::corpus;
use exoseries::error::Result;
use exoseries::fuchsolve::solve_coefficients;
use exoseries::majorant::{build_majorant, certified_radius, check_dominance, estimate_m_bound, solve_majorant, MajorantParams};
use exoseries::pipeline::{reduce_stage, sigma_stage, PipelineConfig};
use exoseries::reduction::check_hypotheses;
use exoseries::scalar::Backend;

fn main() -> Result<()> {
    let (f, phi) = corpus::RICCATI.load(Backend::Exact)?;
    let h = check_hypotheses(&f, &phi, 12, 24)?;
    let (_, eq) = reduce_stage(&f, &phi, &h)?;
    let psi = solve_coefficients(&eq, 12, 24)?.psi;
    let sigma = sigma_stage(&eq, &PipelineConfig::default())?.sigma;
    let params = MajorantParams::default();
    let me = build_majorant(&eq, sigma, params.clone())?;
    let big = solve_majorant(&me, 12, 24)?;
    println!("sigma = {sigma}, g = {:?}, {} terms in M~", me.g, me.m_tilde.len());
    for k in 1..=5 {
        let row: Vec<String> = (0..8).map(|l| format!("{:.3}", big.entry(k, l))).collect();
        println!("C_{k}: {}", row.join(" "));
    }
    let rep = check_dominance(&psi, &big)?;
    println!("dominance ok {} over {} entries, worst margin {:.3e} at {:?}", rep.ok, rep.checked, rep.worst_margin, rep.worst_entry);

    let mut corrupted = big.clone();
    *corrupted.entry_mut(1, 0).unwrap() /= 2.0;
    let bad = check_dominance(&psi, &corrupted)?;
    println!("after halving C[1,0]: first violation {:?}", bad.first_violation);

    let bound = estimate_m_bound(&me, params.tau, params.tau_prime)?;
    println!("M bound {:.6} (tail warning {}), certified radius {:.6e}", bound.value, bound.tail_warning, certified_radius(&params, bound.value));
    Ok(())
}
