//! The ODE input language and the expansions of `F` along a jet.
//!
//! An ODE file looks like
//!
//! ```text
//! # Riccati-type equation
//! eta = 1
//! order = 1
//! coeff a = {"poleOrder": 0, "truncOrder": 8, "coeffs": [["1", "0"]]}
//! F = delta(y,1) - (1-i)*(y^2 - y)
//! ```
//!
//! `coeff` lines declare holomorphic coefficient functions of `x` as
//! truncated power series (Laurent records without negative powers).
//! Everything after `F =` up to the end of the file is the expression.

mod parser;

use std::collections::BTreeMap;

use num::{BigRational, Complex, Zero};

pub use parser::{parse_expr, parse_expr_at, Expr};

use crate::error::{Error, Result};
use crate::exotic::{ExoticSeries, JetTuple};
use crate::laurent::{LaurentRecord, LaurentSeries, Trunc};
use crate::multiseries::MultiSeries;
use crate::scalar::{parse_rational, Backend, Complex64, ComplexScalar, GaussianRational};

/// A parsed `F(x, y, δy, …, δⁿy)` with its declared data.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeExpression {
    pub expr: Expr,
    pub order: usize,
    pub declared_order: Option<usize>,
    pub eta: Option<BigRational>,
    pub coeffs: BTreeMap<String, LaurentRecord>,
}

/// Parses a bare expression; the order is the largest `j` in `delta(y, j)`.
pub fn parse_ode(text: &str) -> Result<OdeExpression> {
    let expr = parse_expr(text)?;
    let order = expr.max_delta().unwrap_or(0);
    Ok(OdeExpression {
        expr,
        order,
        declared_order: None,
        eta: None,
        coeffs: BTreeMap::new(),
    })
}

/// Parses the ODE file format (header lines followed by `F = ...`).
pub fn parse_ode_file(text: &str) -> Result<OdeExpression> {
    let mut eta = None;
    let mut declared = None;
    let mut coeffs = BTreeMap::new();
    let mut offset = 0;
    for (lineno, raw) in text.split_inclusive('\n').enumerate() {
        let line_start = offset;
        offset += raw.len();
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Format(format!("line {}: {msg}", lineno + 1));
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("expected `key = value`, found {line:?}")))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "eta" => eta = Some(parse_rational(value).map_err(|e| bad(e.to_string()))?),
            "order" => {
                declared = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| bad(format!("order must be a nonnegative integer, got {value:?}")))?,
                )
            }
            "F" => {
                let eq = raw.find('=').unwrap();
                let expr = parse_expr_at(text, line_start + eq + 1)?;
                return finish_file(expr, declared, eta, coeffs);
            }
            _ => {
                let name = key
                    .strip_prefix("coeff")
                    .map(str::trim)
                    .filter(|n| !n.is_empty() && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
                    .ok_or_else(|| bad(format!("unknown header {key:?}")))?;
                if matches!(name, "i" | "x" | "y" | "delta") {
                    return Err(bad(format!("{name:?} is reserved")));
                }
                let rec: LaurentRecord =
                    serde_json::from_str(value).map_err(|e| bad(format!("coefficient record: {e}")))?;
                if rec.pole_order > 0 {
                    return Err(bad(format!(
                        "coefficient {name} has negative powers of x; only holomorphic coefficients are allowed"
                    )));
                }
                coeffs.insert(name.to_string(), rec);
            }
        }
    }
    Err(Error::Format("missing `F = <expression>` line".into()))
}

fn finish_file(
    expr: Expr,
    declared: Option<usize>,
    eta: Option<BigRational>,
    coeffs: BTreeMap<String, LaurentRecord>,
) -> Result<OdeExpression> {
    let max = expr.max_delta().unwrap_or(0);
    if let Some(n) = declared {
        if max > n {
            return Err(Error::OrderExceeded { index: max, order: n });
        }
    }
    let mut names = Vec::new();
    expr.coeff_names(&mut names);
    if let Some(missing) = names.iter().find(|n| !coeffs.contains_key(*n)) {
        return Err(Error::Format(format!("undeclared coefficient function {missing:?}")));
    }
    if let Some(e) = &eta {
        if e.is_zero() {
            return Err(Error::Config("eta must be nonzero".into()));
        }
    }
    Ok(OdeExpression {
        expr,
        order: declared.unwrap_or(max),
        declared_order: declared,
        eta,
        coeffs,
    })
}

/// Operations shared by the value types an expression can be evaluated in.
trait Algebra: Sized {
    fn add(&self, o: &Self) -> Result<Self>;
    fn sub(&self, o: &Self) -> Result<Self>;
    fn mul(&self, o: &Self) -> Result<Self>;
    fn neg(&self) -> Result<Self>;
    fn pow(&self, e: u32) -> Result<Self>;
}

impl Algebra for ExoticSeries {
    fn add(&self, o: &Self) -> Result<Self> {
        ExoticSeries::add(self, o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        ExoticSeries::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        ExoticSeries::mul(self, o)
    }
    fn neg(&self) -> Result<Self> {
        Ok(ExoticSeries::neg(self))
    }
    fn pow(&self, e: u32) -> Result<Self> {
        ExoticSeries::pow(self, e)
    }
}

impl Algebra for MultiSeries {
    fn add(&self, o: &Self) -> Result<Self> {
        MultiSeries::add(self, o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        MultiSeries::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        MultiSeries::mul(self, o)
    }
    fn neg(&self) -> Result<Self> {
        Ok(MultiSeries::neg(self))
    }
    fn pow(&self, e: u32) -> Result<Self> {
        MultiSeries::pow(self, e)
    }
}

impl Algebra for Complex64 {
    fn add(&self, o: &Self) -> Result<Self> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(self * o)
    }
    fn neg(&self) -> Result<Self> {
        Ok(-self)
    }
    fn pow(&self, e: u32) -> Result<Self> {
        Ok(self.powi(e as i32))
    }
}

fn eval<T: Algebra>(e: &Expr, leaf: &mut dyn FnMut(&Expr) -> Result<T>) -> Result<T> {
    match e {
        Expr::Const(_) | Expr::X | Expr::Delta(_) | Expr::Coeff(_) => leaf(e),
        Expr::Neg(a) => eval(a, leaf)?.neg(),
        Expr::Add(a, b) => eval(a, leaf)?.add(&eval(b, leaf)?),
        Expr::Sub(a, b) => eval(a, leaf)?.sub(&eval(b, leaf)?),
        Expr::Mul(a, b) => eval(a, leaf)?.mul(&eval(b, leaf)?),
        Expr::Div(a, b) => {
            let d = b
                .constant()
                .ok_or_else(|| Error::Internal("division by a non-constant survived parsing".into()))?;
            let one = Complex::new(BigRational::from_integer(1.into()), BigRational::zero());
            let inv = Expr::Const(&one / d);
            eval(a, leaf)?.mul(&leaf(&inv)?)
        }
        Expr::Pow(a, k) => eval(a, leaf)?.pow(*k),
    }
}

fn const_exotic(eta: &ComplexScalar, c: &GaussianRational) -> Result<ExoticSeries> {
    let s = eta.backend().gaussian(c);
    ExoticSeries::constant(eta, LaurentSeries::constant(s, Trunc::Exact))
}

fn x_exotic(eta: &ComplexScalar) -> Result<ExoticSeries> {
    ExoticSeries::monomial(eta, 1, LaurentSeries::one(eta.backend()))
}

impl OdeExpression {
    /// `max(4, degree of F in the jet variables)`.
    pub fn default_degree_bound(&self) -> u32 {
        self.expr.y_degree().max(4)
    }

    /// The declared coefficient function `name` as a series in `x` with
    /// `t`-independent grades.
    pub fn coefficient_series(&self, name: &str, eta: &ComplexScalar) -> Result<ExoticSeries> {
        let rec = self
            .coeffs
            .get(name)
            .ok_or_else(|| Error::Format(format!("undeclared coefficient function {name:?}")))?;
        let backend = eta.backend();
        let series = LaurentSeries::from_record(rec, backend)?;
        let grades = series
            .terms()
            .map(|(k, c)| (k as u32, LaurentSeries::constant(c.clone(), Trunc::Exact)))
            .collect::<Vec<_>>();
        ExoticSeries::from_grades(eta, series.trunc(), grades)
    }

    /// Evaluates the expression tree directly in the exotic-series ring,
    /// with `delta(y, j)` replaced by `values[j]`.
    pub fn eval_exotic(&self, eta: &ComplexScalar, values: &[ExoticSeries]) -> Result<ExoticSeries> {
        self.check_len(values.len())?;
        let x = x_exotic(eta)?;
        eval(&self.expr, &mut |leaf| match leaf {
            Expr::Const(c) => const_exotic(eta, c),
            Expr::X => Ok(x.clone()),
            Expr::Delta(j) => Ok(values[*j].clone()),
            Expr::Coeff(n) => self.coefficient_series(n, eta),
            _ => unreachable!(),
        })
    }

    /// Evaluates in the multi-series ring with `delta(y, j)` replaced by
    /// `values[j]`.
    pub fn eval_multi(&self, eta: &ComplexScalar, values: &[MultiSeries]) -> Result<MultiSeries> {
        self.check_len(values.len())?;
        let (nv, bound) = (values[0].nvars(), values[0].degree_bound());
        let x = x_exotic(eta)?;
        eval(&self.expr, &mut |leaf| match leaf {
            Expr::Const(c) => Ok(MultiSeries::constant(&const_exotic(eta, c)?, nv, bound)),
            Expr::X => Ok(MultiSeries::constant(&x, nv, bound)),
            Expr::Delta(j) => Ok(values[*j].clone()),
            Expr::Coeff(n) => Ok(MultiSeries::constant(&self.coefficient_series(n, eta)?, nv, bound)),
            _ => unreachable!(),
        })
    }

    /// Numeric value at a point; coefficient functions are summed over their
    /// retained terms.
    pub fn eval_c64(&self, x: Complex64, ys: &[Complex64]) -> Result<Complex64> {
        self.check_len(ys.len())?;
        eval(&self.expr, &mut |leaf| match leaf {
            Expr::Const(c) => Ok(Backend::Exact.gaussian(c).to_c64()),
            Expr::X => Ok(x),
            Expr::Delta(j) => Ok(ys[*j]),
            Expr::Coeff(n) => {
                let rec = &self.coeffs[n];
                let s = LaurentSeries::from_record(rec, Backend::Float { bits: 64 })?;
                Ok(s.eval_c64(x))
            }
            _ => unreachable!(),
        })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.order + 1 {
            return Err(Error::Shape(format!(
                "F has order {} and needs {} jet components, got {len}",
                self.order,
                self.order + 1
            )));
        }
        Ok(())
    }

    /// `F` as a polynomial in `y_0..y_n` with exotic-series coefficients.
    pub fn polynomial(&self, eta: &ComplexScalar) -> Result<MultiSeries> {
        let nv = self.order + 1;
        let bound = self.expr.y_degree();
        let vars = (0..nv)
            .map(|i| MultiSeries::var(eta, nv, i, bound))
            .collect::<Result<Vec<_>>>()?;
        self.eval_multi(eta, &vars)
    }

    /// Renders the ODE file format; parsing the output gives back `self`.
    pub fn to_file_text(&self) -> String {
        let mut out = String::new();
        if let Some(eta) = &self.eta {
            out.push_str(&format!("eta = {eta}\n"));
        }
        if let Some(n) = self.declared_order {
            out.push_str(&format!("order = {n}\n"));
        }
        for (name, rec) in &self.coeffs {
            let json = serde_json::to_string(rec).expect("records serialize");
            out.push_str(&format!("coeff {name} = {json}\n"));
        }
        out.push_str(&format!("F = {}\n", self.expr));
        out
    }
}

fn check_jet(f: &OdeExpression, phi: &JetTuple) -> Result<()> {
    if phi.order() != f.order {
        return Err(Error::Shape(format!(
            "F has order {} but the jet has order {}",
            f.order,
            phi.order()
        )));
    }
    Ok(())
}

/// The residual series `F(x, φ, δφ, …, δⁿφ)`.
pub fn substitute_jet(f: &OdeExpression, phi: &JetTuple) -> Result<ExoticSeries> {
    check_jet(f, phi)?;
    let eta = phi.component(0).eta();
    f.polynomial(eta)?.evaluate(phi.components())
}

/// `∂F/∂y_i` evaluated along the jet.
pub fn partial_series(f: &OdeExpression, phi: &JetTuple, i: usize) -> Result<ExoticSeries> {
    check_jet(f, phi)?;
    if i > f.order {
        return Err(Error::Shape(format!("index {i} exceeds the order {}", f.order)));
    }
    let eta = phi.component(0).eta();
    f.polynomial(eta)?.derivative(i)?.evaluate(phi.components())
}

/// The partial sum `Σ_{k ≤ m} α_k x^k`, exact in `x`.
pub fn partial_sum(phi: &ExoticSeries, m: u32) -> Result<ExoticSeries> {
    if !phi.trunc_k().covers(m as i64) {
        return Err(Error::Truncation(format!(
            "the series is known through x^{} but the partial sum needs x^{m}",
            phi.trunc_k()
        )));
    }
    Ok(phi.truncate(Trunc::At(m as i64), Trunc::Exact).with_trunc_k(Trunc::Exact))
}

/// The substitution `y_i = δ^i Φ_m + x^m u_i` in the variables `u_0..u_n`,
/// where `u_i` stands for `(δ + m)^i u`.
pub fn shifted_variables(
    f: &OdeExpression,
    phi: &ExoticSeries,
    m: u32,
    degree_bound: u32,
) -> Result<Vec<MultiSeries>> {
    let nv = f.order + 1;
    let eta = phi.eta();
    let center = JetTuple::new(&partial_sum(phi, m)?, f.order)?;
    let xm = ExoticSeries::monomial(eta, m, LaurentSeries::one(eta.backend()))?;
    (0..nv)
        .map(|i| {
            let c = MultiSeries::constant(center.component(i), nv, degree_bound);
            let u = MultiSeries::var(eta, nv, i, degree_bound)?.scale(&xm)?;
            c.add(&u)
        })
        .collect()
}

/// `F(x, Φ_m + x^m U)` as a multi-series in `(t, x, u_0, …, u_n)`, via the
/// polynomial form of `F`.
pub fn expand_multiseries(
    f: &OdeExpression,
    phi: &ExoticSeries,
    m: u32,
    degree_bound: u32,
) -> Result<MultiSeries> {
    if degree_bound < 2 {
        return Err(Error::Config("degree bound must be at least 2".into()));
    }
    let vars = shifted_variables(f, phi, m, degree_bound)?;
    f.polynomial(phi.eta())?.compose(&vars)
}

/// Same expansion computed by evaluating the expression tree directly.
pub fn expand_multiseries_direct(
    f: &OdeExpression,
    phi: &ExoticSeries,
    m: u32,
    degree_bound: u32,
) -> Result<MultiSeries> {
    let vars = shifted_variables(f, phi, m, degree_bound)?;
    f.eval_multi(phi.eta(), &vars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exotic::make_jet;

    const E: Backend = Backend::Exact;

    fn eta() -> ComplexScalar {
        E.int(1)
    }

    fn riccati_phi(k: u32) -> ExoticSeries {
        let grades = (0..=k).map(|j| (j, LaurentSeries::monomial(E.int(1), -(j as i64), Trunc::Exact)));
        ExoticSeries::from_grades(&eta(), Trunc::At(k as i64), grades).unwrap()
    }

    #[test]
    fn linear_residual_vanishes() {
        let f = parse_ode("delta(y,1) - i*y").unwrap();
        let phi = ExoticSeries::constant(&eta(), LaurentSeries::monomial(E.int(1), 1, Trunc::Exact)).unwrap();
        let jet = make_jet(&phi, 1).unwrap();
        assert!(substitute_jet(&f, &jet).unwrap().is_zero());
        let d1 = partial_series(&f, &jet, 1).unwrap();
        assert_eq!(d1, ExoticSeries::one(&eta()).unwrap());
        let d0 = partial_series(&f, &jet, 0).unwrap();
        assert_eq!(d0.grade(0).unwrap().coeff(0), E.parse_pair("0", "-1").unwrap());
    }

    #[test]
    fn perturbed_linear_residual_is_grade_one() {
        let f = parse_ode("delta(y,1) - i*y").unwrap();
        let phi = ExoticSeries::from_grades(
            &eta(),
            Trunc::At(3),
            [
                (0, LaurentSeries::monomial(E.int(1), 1, Trunc::Exact)),
                (1, LaurentSeries::one(E)),
            ],
        )
        .unwrap();
        let res = substitute_jet(&f, &make_jet(&phi, 1).unwrap()).unwrap();
        assert_eq!(res.ordx(), Some(1));
        // δx - i x = (1 - i) x
        assert_eq!(res.grade(1).unwrap().coeff(0), E.parse_pair("1", "-1").unwrap());
    }

    #[test]
    fn riccati_residual_and_partials() {
        let f = parse_ode("delta(y,1) - (1-i)*(y^2 - y)").unwrap();
        let jet = make_jet(&riccati_phi(12), 1).unwrap();
        let res = substitute_jet(&f, &jet).unwrap();
        assert!(res.is_zero());
        assert_eq!(res.trunc_k(), Trunc::At(12));
        let d0 = partial_series(&f, &jet, 0).unwrap();
        assert_eq!(d0.ordx(), Some(0));
        assert_eq!(d0.grade(0).unwrap().coeff(0), E.parse_pair("-1", "1").unwrap());
    }

    #[test]
    fn square_partial_is_twice_phi() {
        let f = parse_ode("y^2").unwrap();
        let phi = riccati_phi(5);
        let jet = make_jet(&phi, 0).unwrap();
        let d = partial_series(&f, &jet, 0).unwrap();
        assert_eq!(d, phi.scale(&E.int(2)).unwrap());
    }

    #[test]
    fn expansions_agree_and_linear_has_no_quadratic_terms() {
        let f = parse_ode("delta(y,1) - i*y").unwrap();
        let phi = ExoticSeries::constant(&eta(), LaurentSeries::monomial(E.int(1), 1, Trunc::Exact)).unwrap();
        let phi = phi.with_trunc_k(Trunc::At(6));
        let m = expand_multiseries(&f, &phi, 1, 4).unwrap();
        assert!(m.terms().keys().all(|q| q.iter().sum::<u32>() <= 1));
        let r = parse_ode("delta(y,1) - (1-i)*(y^2 - y)").unwrap();
        let phi = riccati_phi(8);
        let a = expand_multiseries(&r, &phi, 2, 4).unwrap();
        let b = expand_multiseries_direct(&r, &phi, 2, 4).unwrap();
        assert!(a.sub(&b).unwrap().is_zero());
        // the u0^2 coefficient is -(1-i) x^4
        let q2 = a.coeff(&[2, 0]).unwrap();
        assert_eq!(q2.grade(4).unwrap().coeff(0), E.parse_pair("-1", "1").unwrap());
    }

    #[test]
    fn file_format_round_trip() {
        let text = "# test\neta = 1/2\norder = 2\ncoeff a = {\"poleOrder\": 0, \"truncOrder\": 4, \"coeffs\": [[\"1\",\"0\"],[\"0\",\"2\"]]}\nF = a*delta(y,2) - x*y\n";
        let ode = parse_ode_file(text).unwrap();
        assert_eq!(ode.order, 2);
        assert_eq!(ode.eta.as_ref().unwrap().to_string(), "1/2");
        let again = parse_ode_file(&ode.to_file_text()).unwrap();
        assert_eq!(again, ode);
        let a = ode.coefficient_series("a", &E.parse_real("1/2").unwrap()).unwrap();
        assert_eq!(a.trunc_k(), Trunc::At(4));
        assert_eq!(a.grade(1).unwrap().coeff(0), E.parse_pair("0", "2").unwrap());
    }

    #[test]
    fn file_errors() {
        assert!(matches!(
            parse_ode_file("order = 1\nF = delta(y,2)\n"),
            Err(Error::OrderExceeded { index: 2, order: 1 })
        ));
        assert!(matches!(parse_ode_file("F = b*y\n"), Err(Error::Format(_))));
        assert!(matches!(parse_ode_file("eta = 1\n"), Err(Error::Format(_))));
        match parse_ode_file("eta = 1\nF = y +\n  )") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
