//! Hypothesis checks on `∂F/∂y_i(x, Φ)`, the choice of the shift `m`, and
//! the reduction `y = Σ_{k≤m} α_k x^k + x^m u` to the quasi-linear form
//!
//! ```text
//! t^r Σ_i A_i(t) (δ + m)^i u = x M(t, x, u_0, …, u_n),   u_i = (δ + m)^i u.
//! ```
//!
//! With `G = x^{-(N+m)} F(x, Φ_m + x^m U)` and `B_i` the `x^0` part of the
//! coefficient of `u_i` in `G`, the reduction takes `b = ord B_n`,
//! `A_i = t^{-b} B_i`, `M' = -(G - Σ B_i u_i) / x`, then the smallest `e ≥ -b`
//! making `M = t^e M'` holomorphic in `t`, and `r = b + e`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exotic::{make_jet, ExoticSeries};
use crate::fexpr::{expand_multiseries, partial_series, substitute_jet, OdeExpression};
use crate::laurent::{LaurentRecord, LaurentSeries, Trunc};
use crate::multiseries::{MultiRecord, MultiSeries};
use crate::roots::{lattice_zeros, poly_roots, LatticeHit};
use crate::scalar::{Backend, Complex64, ComplexScalar};

/// Default number of retained `x`-grades.
pub const DEFAULT_TRUNC_K: i64 = 24;
/// Default `t`-truncation of each grade.
pub const DEFAULT_TRUNC_L: i64 = 48;
/// How far above `m_min` the search for `m` may go.
pub const M_SEARCH_CAP: u32 = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    /// Common leading `x`-order, the `x`-order of `∂F/∂y_n(x, Φ)`.
    pub n: Option<u32>,
    /// `x`-order of each `∂F/∂y_i(x, Φ)`; `None` when zero to truncation.
    pub x_orders: Vec<Option<u32>>,
    /// `ord_0 B_i`; `None` stands for `+∞`.
    pub ord_b: Vec<Option<i64>>,
    /// The leading parts `B_i`.
    pub b: Vec<LaurentSeries>,
    pub satisfied: bool,
    /// Indices `i` breaking a hypothesis.
    pub violations: Vec<usize>,
    /// `∂F/∂y_n` vanished to the retained orders, so nothing is certified.
    pub indeterminate: bool,
    pub is_solution: bool,
    /// Lowest nonzero grade of the residual `F(x, Φ)`.
    pub residual_grade: Option<u32>,
    pub certified_to: (Trunc, Trunc),
}

impl HypothesisReport {
    pub fn to_record(&self) -> HypothesisRecord {
        HypothesisRecord {
            n: self.n,
            x_orders: self.x_orders.clone(),
            ord_b: self.ord_b.clone(),
            satisfied: self.satisfied,
            violations: self.violations.clone(),
            indeterminate: self.indeterminate,
            is_solution_to_order: self.is_solution,
            residual_grade: self.residual_grade,
            certified_to_order: [self.certified_to.0.finite(), self.certified_to.1.finite()],
        }
    }

    /// Turns a failed report into the matching error.
    pub fn require(&self) -> Result<()> {
        if let Some(k) = self.residual_grade {
            return Err(Error::NotASolution { grade: k });
        }
        if self.indeterminate {
            return Err(Error::Indeterminate(format!(
                "dF/dy_n vanishes through orders {:?}",
                (self.certified_to.0.finite(), self.certified_to.1.finite())
            )));
        }
        if !self.satisfied {
            return Err(Error::Hypothesis(format!(
                "violating indices {:?} (N = {:?}, ord B = {:?})",
                self.violations, self.n, self.ord_b
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HypothesisRecord {
    #[serde(rename = "N")]
    pub n: Option<u32>,
    pub x_orders: Vec<Option<u32>>,
    pub ord_b: Vec<Option<i64>>,
    pub satisfied: bool,
    pub violations: Vec<usize>,
    pub indeterminate: bool,
    pub is_solution_to_order: bool,
    pub residual_grade: Option<u32>,
    pub certified_to_order: [Option<i64>; 2],
}

/// Truncates `φ` to `x^k` and `t^l` in every grade.
pub fn truncate_phi(phi: &ExoticSeries, k: i64, l: i64) -> ExoticSeries {
    phi.truncate(Trunc::At(k), Trunc::At(l))
}

/// Residual check and leading-order analysis of `∂F/∂y_i(x, Φ)`.
pub fn check_hypotheses(f: &OdeExpression, phi: &ExoticSeries, k: i64, l: i64) -> Result<HypothesisReport> {
    let phi = truncate_phi(phi, k, l);
    let jet = make_jet(&phi, f.order)?;
    let residual = substitute_jet(f, &jet)?;
    let residual_grade = residual.ordx();
    let partials = (0..=f.order)
        .map(|i| partial_series(f, &jet, i))
        .collect::<Result<Vec<_>>>()?;
    let x_orders: Vec<Option<u32>> = partials.iter().map(ExoticSeries::ordx).collect();
    let certified_to = (phi.trunc_k(), Trunc::At(l));
    let nn = f.order;
    let Some(n) = x_orders[nn] else {
        return Ok(HypothesisReport {
            n: None,
            x_orders,
            ord_b: vec![None; nn + 1],
            b: vec![LaurentSeries::zero(phi.backend(), Trunc::At(l)); nn + 1],
            satisfied: false,
            violations: vec![nn],
            indeterminate: true,
            is_solution: residual_grade.is_none(),
            residual_grade,
            certified_to,
        });
    };
    let b: Vec<LaurentSeries> = partials
        .iter()
        .map(|p| {
            p.grade_or_zero(n)
                .unwrap_or_else(|| LaurentSeries::zero(phi.backend(), Trunc::At(l)))
        })
        .collect();
    let ord_b: Vec<Option<i64>> = b.iter().map(LaurentSeries::ord).collect();
    let ord_bn = ord_b[nn].expect("B_n is nonzero at the x-order of dF/dy_n");
    let violations: Vec<usize> = (0..=nn)
        .filter(|&i| {
            let low_x = x_orders[i].is_some_and(|o| o < n);
            let low_t = ord_b[i].is_some_and(|o| o < ord_bn);
            low_x || low_t
        })
        .collect();
    Ok(HypothesisReport {
        n: Some(n),
        x_orders,
        ord_b,
        b,
        satisfied: violations.is_empty(),
        violations,
        indeterminate: false,
        is_solution: residual_grade.is_none(),
        residual_grade,
        certified_to,
    })
}

/// Outcome of the search for the shift `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct MChoice {
    pub m: u32,
    pub m_min: u32,
    /// Floating roots of `L`.
    pub roots: Vec<Complex64>,
    /// Lattice zeros `n + iηj`, `n ≥ 1`, of `L`.
    pub lattice_zeros: Vec<LatticeHit>,
}

/// `L(z) = Σ A_i(0) z^i` with `A_i = t^{-ord B_n} B_i`.
pub fn indicial_coeffs(report: &HypothesisReport) -> Result<Vec<ComplexScalar>> {
    let nn = report.b.len() - 1;
    let b = report.ord_b[nn].ok_or_else(|| Error::Hypothesis("B_n vanishes".into()))?;
    Ok(report.b.iter().map(|bi| bi.coeff(b)).collect())
}

/// Smallest `m ≥ m_min = N + 1` such that no `k ≥ 1`, `j ∈ ℤ` makes
/// `k + m + iηj` a root of `L`.
pub fn select_m(lcoeffs: &[ComplexScalar], eta: &ComplexScalar, n: u32) -> Result<MChoice> {
    let m_min = n + 1;
    let c64: Vec<Complex64> = lcoeffs.iter().map(ComplexScalar::to_c64).collect();
    let roots = poly_roots(&c64)?;
    let hits = lattice_zeros(lcoeffs, eta)?;
    let worst = hits.iter().map(|h| h.n).max().unwrap_or(0);
    let m = m_min.max(worst.max(0) as u32);
    if m > m_min + M_SEARCH_CAP {
        return Err(Error::Lattice {
            k: worst - (m_min + M_SEARCH_CAP) as i64,
            j: hits.last().map_or(0, |h| h.j),
        });
    }
    Ok(MChoice {
        m,
        m_min,
        roots,
        lattice_zeros: hits,
    })
}

/// Whether shift `m` avoids every lattice zero.
pub fn m_admissible(hits: &[LatticeHit], m: u32) -> bool {
    hits.iter().all(|h| h.n <= m as i64)
}

/// The reduced equation `t^r Σ A_i(t)(δ+m)^i u = x M(t, x, U)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedEquation {
    pub eta: ComplexScalar,
    pub m: u32,
    pub r: i64,
    /// Leading `x`-order `N` of the partial derivatives.
    pub n_x: u32,
    /// Power `e` of `t` multiplied into `M`; `r = ord B_n + e`.
    pub e: i64,
    pub a: Vec<LaurentSeries>,
    pub lcoeffs: Vec<ComplexScalar>,
    pub m_series: MultiSeries,
}

impl ReducedEquation {
    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    pub fn backend(&self) -> Backend {
        self.eta.backend()
    }

    pub fn to_record(&self) -> ReducedRecord {
        ReducedRecord {
            eta: self.eta.to_strings()[0].clone(),
            m: self.m,
            r: self.r,
            n: self.n_x,
            e: self.e,
            a: self.a.iter().map(LaurentSeries::to_record).collect(),
            lcoeffs: self.lcoeffs.iter().map(ComplexScalar::to_strings).collect(),
            m_series: self.m_series.to_record(),
        }
    }

    pub fn from_record(rec: &ReducedRecord, backend: Backend) -> Result<ReducedEquation> {
        let eta = backend.parse_real(&rec.eta)?;
        let a = rec
            .a
            .iter()
            .map(|r| LaurentSeries::from_record(r, backend))
            .collect::<Result<Vec<_>>>()?;
        let lcoeffs = rec
            .lcoeffs
            .iter()
            .map(|[re, im]| backend.parse_pair(re, im))
            .collect::<Result<Vec<_>>>()?;
        if a.is_empty() || a.len() != lcoeffs.len() {
            return Err(Error::Format("A and Lcoeffs must be nonempty and of equal length".into()));
        }
        let m_series = MultiSeries::from_record(&rec.m_series, &rec.eta, backend)?;
        if m_series.nvars() != a.len() {
            return Err(Error::Format("M must have one variable per A_i".into()));
        }
        let eq = ReducedEquation {
            eta,
            m: rec.m,
            r: rec.r,
            n_x: rec.n,
            e: rec.e,
            a,
            lcoeffs,
            m_series,
        };
        eq.validate()?;
        Ok(eq)
    }

    /// Holomorphic `A_i`, `Lcoeffs[i] = A_i(0)`, `A_n(0) ≠ 0`, `r ≥ 0`.
    pub fn validate(&self) -> Result<()> {
        if self.r < 0 {
            return Err(Error::Reduction(format!("r = {} is negative", self.r)));
        }
        for (i, a) in self.a.iter().enumerate() {
            if a.ord().is_some_and(|o| o < 0) {
                return Err(Error::Reduction(format!("A_{i} has a pole")));
            }
            if a.coeff(0) != self.lcoeffs[i] {
                return Err(Error::Reduction(format!("Lcoeffs[{i}] differs from A_{i}(0)")));
            }
        }
        let tol = self.backend().zero_tol();
        if self.lcoeffs.last().is_none_or(|c| c.is_negligible(tol)) {
            return Err(Error::Reduction("A_n(0) vanishes".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReducedRecord {
    pub eta: String,
    pub m: u32,
    pub r: i64,
    #[serde(rename = "N")]
    pub n: u32,
    pub e: i64,
    #[serde(rename = "A")]
    pub a: Vec<LaurentRecord>,
    #[serde(rename = "Lcoeffs")]
    pub lcoeffs: Vec<[String; 2]>,
    #[serde(rename = "M")]
    pub m_series: MultiRecord,
}

/// `Σ_i c_i u_i` with series coefficients `c_i(t)` constant in `x`.
pub fn linear_form(eta: &ComplexScalar, coeffs: &[LaurentSeries], degree_bound: u32) -> Result<MultiSeries> {
    let nv = coeffs.len();
    let terms = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut q = vec![0; nv];
            q[i] = 1;
            Ok((q, ExoticSeries::constant(eta, c.clone())?))
        })
        .collect::<Result<Vec<_>>>()?;
    MultiSeries::from_terms(eta, nv, degree_bound, terms)
}

/// `x^{-(N+m)} F(x, Φ_m + x^m U)`.
pub fn normalized_expansion(f: &OdeExpression, phi: &ExoticSeries, n: u32, m: u32) -> Result<MultiSeries> {
    let full = expand_multiseries(f, phi, m, f.default_degree_bound())?;
    let shift = -((n + m) as i64);
    full.map_coeffs(|q, c| {
        c.shift_x(shift).map_err(|_| {
            Error::Reduction(format!(
                "the coefficient of u^{q:?} has terms below x^{}; phi is not a solution to that order",
                n + m
            ))
        })
    })
}

/// Applies the transformation for a given `m` and extracts `(r, A_i, M)`.
pub fn reduce(f: &OdeExpression, phi: &ExoticSeries, n: u32, m: u32) -> Result<ReducedEquation> {
    if m < n + 1 {
        return Err(Error::Config(format!("m = {m} is below m_min = {}", n + 1)));
    }
    let eta = phi.eta().clone();
    let nv = f.order + 1;
    let g = normalized_expansion(f, phi, n, m)?;
    let bound = g.degree_bound();
    let b: Vec<LaurentSeries> = (0..nv)
        .map(|i| {
            let mut q = vec![0; nv];
            q[i] = 1;
            g.coeff(&q)
                .and_then(|c| c.grade_or_zero(0))
                .unwrap_or_else(|| LaurentSeries::zero(eta.backend(), Trunc::Exact))
        })
        .collect();
    let bo = b[nv - 1]
        .ord()
        .ok_or_else(|| Error::Reduction("the coefficient of u_n has a vanishing leading part B_n".into()))?;
    let a: Vec<LaurentSeries> = b.iter().map(|bi| bi.shift(-bo)).collect();
    for (i, ai) in a.iter().enumerate() {
        if ai.ord().is_some_and(|o| o < 0) {
            return Err(Error::Reduction(format!(
                "A_{i} = t^{}B_{i} has a pole: ord B_{i} < ord B_n",
                -bo
            )));
        }
    }
    let rest = g.sub(&linear_form(&eta, &b, bound)?)?;
    let m_prime = rest.map_coeffs(|q, c| {
        c.shift_x(-1)
            .map(|s| s.neg())
            .map_err(|_| Error::Reduction(format!("the coefficient of u^{q:?} lacks the factor x")))
    })?;
    let min_t = m_prime
        .terms()
        .values()
        .flat_map(|c| c.grades().values().filter_map(LaurentSeries::ord))
        .min();
    let e = match min_t {
        Some(s) => (-s).max(-bo),
        None => -bo,
    };
    let m_series = m_prime.map_coeffs(|_, c| Ok(c.shift_t(e)))?;
    let lcoeffs = a.iter().map(|ai| ai.coeff(0)).collect();
    let eq = ReducedEquation {
        eta,
        m,
        r: bo + e,
        n_x: n,
        e,
        a,
        lcoeffs,
        m_series,
    };
    eq.validate()?;
    Ok(eq)
}

/// `F(x, Φ_m + x^m U) - x^{N+m} t^{-e} (t^r Σ A_i u_i - x M)`; zero to
/// truncation when the reduction is correct.
pub fn round_trip_defect(f: &OdeExpression, phi: &ExoticSeries, eq: &ReducedEquation) -> Result<MultiSeries> {
    let full = expand_multiseries(f, phi, eq.m, f.default_degree_bound())?;
    let bound = full.degree_bound();
    let lhs = linear_form(&eq.eta, &eq.a, bound)?.map_coeffs(|_, c| Ok(c.shift_t(eq.r)))?;
    let rhs = eq.m_series.map_coeffs(|_, c| c.shift_x(1))?;
    let reduced = lhs
        .sub(&rhs)?
        .map_coeffs(|_, c| c.shift_x((eq.n_x + eq.m) as i64).map(|s| s.shift_t(-eq.e)))?;
    full.sub(&reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fexpr::parse_ode;

    const E: Backend = Backend::Exact;

    fn eta() -> ComplexScalar {
        E.int(1)
    }

    fn riccati_phi(k: u32) -> ExoticSeries {
        let grades = (0..=k).map(|j| (j, LaurentSeries::monomial(E.int(1), -(j as i64), Trunc::Exact)));
        ExoticSeries::from_grades(&eta(), Trunc::At(k as i64), grades).unwrap()
    }

    fn linear_phi() -> ExoticSeries {
        ExoticSeries::constant(&eta(), LaurentSeries::monomial(E.int(1), 1, Trunc::Exact))
            .unwrap()
            .with_trunc_k(Trunc::At(24))
    }

    #[test]
    fn linear_hypotheses() {
        let f = parse_ode("delta(y,1) - i*y").unwrap();
        let rep = check_hypotheses(&f, &linear_phi(), 12, 24).unwrap();
        assert!(rep.is_solution && rep.satisfied);
        assert_eq!(rep.n, Some(0));
        assert_eq!(rep.ord_b, vec![Some(0), Some(0)]);
    }

    #[test]
    fn riccati_hypotheses() {
        let f = parse_ode("delta(y,1) - (1-i)*(y^2 - y)").unwrap();
        let rep = check_hypotheses(&f, &riccati_phi(24), 12, 24).unwrap();
        assert!(rep.is_solution && rep.satisfied);
        assert_eq!(rep.n, Some(0));
        assert_eq!(rep.ord_b, vec![Some(0), Some(0)]);
        assert!(rep.require().is_ok());
    }

    #[test]
    fn violating_variant() {
        let f = parse_ode(
            "x*(delta(y,2) - (1-i)*(2*y-1)*delta(y,1)) + (delta(y,1) - (1-i)*(y^2-y))*(y-1)",
        )
        .unwrap();
        let rep = check_hypotheses(&f, &riccati_phi(24), 12, 24).unwrap();
        assert!(rep.is_solution);
        assert!(!rep.satisfied);
        assert_eq!(rep.n, Some(1));
        assert_eq!(rep.ord_b, vec![Some(-1), Some(-1), Some(0)]);
        assert_eq!(rep.violations, vec![0, 1]);
        assert!(matches!(rep.require(), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn select_m_examples() {
        let l = vec![E.int(-5), E.int(1)];
        assert_eq!(select_m(&l, &eta(), 0).unwrap().m, 5);
        let l = vec![E.parse_pair("-2", "-3").unwrap(), E.int(1)];
        assert_eq!(select_m(&l, &eta(), 0).unwrap().m, 2);
        let l = vec![E.int(1), E.int(1)];
        assert_eq!(select_m(&l, &eta(), 0).unwrap().m, 1);
        assert_eq!(select_m(&l, &eta(), 3).unwrap().m, 4);
    }

    #[test]
    fn riccati_reduction() {
        let f = parse_ode("delta(y,1) - (1-i)*(y^2 - y)").unwrap();
        let phi = riccati_phi(24);
        let eq = reduce(&f, &phi, 0, 1).unwrap();
        assert_eq!((eq.r, eq.e), (2, 2));
        assert_eq!(eq.lcoeffs, vec![E.parse_pair("-1", "1").unwrap(), E.int(1)]);
        // M = (1-i)(1 + t u0)^2
        let c = E.parse_pair("1", "-1").unwrap();
        let m0 = eq.m_series.coeff(&[0, 0]).unwrap();
        assert_eq!(m0.grade(0).unwrap(), &LaurentSeries::monomial(c.clone(), 0, Trunc::Exact));
        let m1 = eq.m_series.coeff(&[1, 0]).unwrap();
        assert_eq!(m1.grade(0).unwrap(), &LaurentSeries::monomial(c.mul_int(2), 1, Trunc::Exact));
        let m2 = eq.m_series.coeff(&[2, 0]).unwrap();
        assert_eq!(m2.grade(0).unwrap(), &LaurentSeries::monomial(c, 2, Trunc::Exact));
        assert_eq!(eq.m_series.terms().len(), 3);
        assert!(round_trip_defect(&f, &phi, &eq).unwrap().is_zero());
    }

    #[test]
    fn linear_reduction_has_zero_remainder() {
        let f = parse_ode("delta(y,1) - i*y").unwrap();
        let eq = reduce(&f, &linear_phi(), 0, 1).unwrap();
        assert_eq!(eq.r, 0);
        assert!(eq.m_series.is_zero());
        assert!(round_trip_defect(&f, &linear_phi(), &eq).unwrap().is_zero());
    }

    #[test]
    fn record_round_trip() {
        let f = parse_ode("delta(y,1) - (1-i)*(y^2 - y)").unwrap();
        let eq = reduce(&f, &riccati_phi(10), 0, 1).unwrap();
        let json = serde_json::to_string(&eq.to_record()).unwrap();
        let back = ReducedEquation::from_record(&serde_json::from_str(&json).unwrap(), E).unwrap();
        assert_eq!(back, eq);
    }
}
