//! Residual check and hypothesis report for the shipped problems.

use exoseries::corpus;
use exoseries::error::Result;
use exoseries::reduction::check_hypotheses;
use exoseries::scalar::Backend;

fn main() -> Result<()> {
    for p in corpus::ALL {
        let (f, phi) = p.load(Backend::Exact)?;
        let h = check_hypotheses(&f, &phi, 12, 24)?;
        println!("{:18} solution to order: {:5}  N = {:?}  x-orders {:?}  ord B {:?}  satisfied {} violations {:?}",
            p.name, h.is_solution, h.n, h.x_orders, h.ord_b, h.satisfied, h.violations);
    }
    Ok(())
}
