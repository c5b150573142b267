//! Parsing equation files: headers, coefficient functions, printing and
//! error positions.

use exoseries::error::Result;
use exoseries::fexpr::{parse_ode, parse_ode_file};
use exoseries::scalar::Backend;

fn main() -> Result<()> {
    let text = "\
# a second-order equation with a holomorphic coefficient a(x) = 1 + 2x
eta = 1/2
order = 2
coeff a = {\"poleOrder\": 0, \"truncOrder\": 3, \"coeffs\": [[\"1\", \"0\"], [\"2\", \"0\"]]}
F = a*delta(y,2) - (1+i)*y^2*delta(y,1) + x*y/3
";
    let ode = parse_ode_file(text)?;
    println!("order {}, eta {:?}, degree in y {}", ode.order, ode.eta.as_ref().map(|e| e.to_string()), ode.expr.y_degree());
    println!("F = {}", ode.expr);
    println!("--- normalized file ---\n{}", ode.to_file_text());
    let poly = ode.polynomial(&Backend::Exact.parse_real("1/2")?)?;
    println!("{} monomials in y_0..y_{}", poly.terms().len(), ode.order);

    for bad in ["delta(y,1) - * y", "y^(1/2)", "y / (1 + y)"] {
        match parse_ode(bad) {
            Ok(_) => println!("{bad:?} parsed"),
            Err(e) => println!("{bad:?}: {e}"),
        }
    }
    Ok(())
}
