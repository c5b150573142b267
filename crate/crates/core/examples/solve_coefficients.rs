//! The coefficient recursion of the reduced equation, checked against the
//! known tails of the Riccati and Painleve III series.

use exoseries::corpus;
use exoseries::error::Result;
use exoseries::fuchsolve::solve_coefficients;
use exoseries::pipeline::{compare_tail, reduce_stage};
use exoseries::reduction::check_hypotheses;
use exoseries::scalar::Backend;

fn main() -> Result<()> {
    for p in [corpus::RICCATI, corpus::PAINLEVE3] {
        let (f, phi) = p.load(Backend::Exact)?;
        let h = check_hypotheses(&f, &phi, 12, 24)?;
        let (_, eq) = reduce_stage(&f, &phi, &h)?;
        let sol = solve_coefficients(&eq, 6, 24)?;
        println!("== {}", p.name);
        for step in &sol.steps {
            println!("c_{} (slot pole order {}) = {}", step.k, step.nu_k, sol.psi.grade_or_zero(step.k).unwrap());
        }
        let cmp = compare_tail(&sol.psi, &phi, eq.m);
        println!("agrees with the input tail on grades {:?}, mismatches {:?}", cmp.compared_grades, cmp.mismatched_grades);
    }
    Ok(())
}
