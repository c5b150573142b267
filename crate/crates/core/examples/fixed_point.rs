//! Picard iteration for the majorant fixed-point equation at points of the
//! band, compared with partial sums of the majorant series.

use exoseries::corpus;
use exoseries::error::Result;
use exoseries::majorant::{build_majorant, certified_radius, estimate_m_bound, fixed_point_solve, m_bound_at, solve_majorant, MajorantParams};
use exoseries::pipeline::{band_points, reduce_stage, sigma_stage, PipelineConfig};
use exoseries::reduction::check_hypotheses;
use exoseries::scalar::{Backend, Complex64};

fn main() -> Result<()> {
    for p in [corpus::RICCATI, corpus::PAINLEVE3] {
        let (f, phi) = p.load(Backend::Exact)?;
        let h = check_hypotheses(&f, &phi, 12, 24)?;
        let (_, eq) = reduce_stage(&f, &phi, &h)?;
        let sigma = sigma_stage(&eq, &PipelineConfig::default())?.sigma;
        let params = MajorantParams::default();
        let me = build_majorant(&eq, sigma, params.clone())?;
        let big = solve_majorant(&me, 20, 40)?;
        let bound = estimate_m_bound(&me, params.tau, params.tau_prime)?;
        let radius = certified_radius(&params, bound.value);
        let x = Complex64::new(radius / 2.0, 0.0);
        println!("== {}: radius {radius:.4e}, x = {:.4e}", p.name, x.re);
        for t0 in band_points(&params, 5) {
            let fp = fixed_point_solve(&me, t0, x, 200)?;
            let s = big.partial_sum(t0, x, 20);
            println!(
                "t0 = {t0:.3}: v = {:.6e} after {} iterations, |v - S_20| / |v| = {:.2e}, M bound at |t0| = {:.4}",
                fp.value(),
                fp.iterations,
                (fp.value() - s).norm() / fp.value().norm(),
                m_bound_at(&me, t0).value
            );
        }
    }
    Ok(())
}
