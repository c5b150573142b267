//! Partial sums of the Riccati series on a sector, the sector realizing a
//! band of `|t|`, and the Cauchy-increment convergence diagnostic.

use std::f64::consts::PI;

use exoseries::corpus;
use exoseries::error::Result;
use exoseries::scalar::{Backend, Complex64};
use exoseries::sector::{convergence_diagnostic, eval_partial_sum, point_diagnostic, sector_for_band, t_of_x};

fn main() -> Result<()> {
    let (f, phi) = corpus::RICCATI.load(Backend::Exact)?;
    let x = Complex64::from_polar(0.05, PI / 2.0);
    let t = t_of_x(x, 1.0)?;
    let exact = t / (t - x);
    for k in [10, 20, 30] {
        let s = eval_partial_sum(&phi, x, k)?;
        println!("K = {k:2}: S_K = {s:.12}, |S_K - t/(t-x)| = {:.2e}", (s - exact).norm());
    }
    let sector = sector_for_band(1.0, 0.3, 0.45, 0.05)?;
    println!("band 0.3 < |t| < 0.45 is arg x in ({:.4}, {:.4})", sector.theta_min, sector.theta_max);
    let rep = convergence_diagnostic(&phi, &sector, 4, Some(&f))?;
    for p in rep.points.iter().step_by(5) {
        println!(
            "x = ({:+.4e}, {:+.4e})  q = {:.4e}  |x/t| = {:.4e}  residual {:.1e}  {:?}",
            p.x[0], p.x[1], p.q,
            (Complex64::new(p.x[0], p.x[1]) / Complex64::new(p.t[0], p.t[1])).norm(),
            p.residual.unwrap_or(0.0),
            p.verdict
        );
    }
    println!("{} convergent, {} divergent, {} inconclusive", rep.convergent, rep.divergent, rep.inconclusive);
    let far = Complex64::from_polar(0.5, 1.0);
    let d = point_diagnostic(&phi, far, None)?;
    println!("outside the disc at |x| = 0.5: q = {:.4} ({:?})", d.q, d.verdict);
    Ok(())
}
