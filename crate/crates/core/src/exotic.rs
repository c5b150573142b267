//! Exotic series `Σ_k α_k(t) x^k` with `t = x^{iη}`, and the Euler operator.
//!
//! On a monomial `t^j x^k = x^{k + iηj}` the operator `δ = x d/dx` acts by
//! multiplication with `k + iηj`, so grade `k` maps by
//! `α_k ↦ k α_k + iη θ α_k` where `θ = t d/dt`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{LaurentRecord, LaurentSeries, Trunc};
use crate::scalar::{parse_rational, Backend, Complex64, ComplexScalar};

#[derive(Clone, Debug, PartialEq)]
pub struct ExoticSeries {
    eta: ComplexScalar,
    backend: Backend,
    grades: BTreeMap<u32, LaurentSeries>,
    trunc_k: Trunc,
}

impl ExoticSeries {
    /// The zero series known through `x^trunc_k`.
    pub fn zero(eta: &ComplexScalar, trunc_k: Trunc) -> Result<Self> {
        if eta.is_zero() || !eta.is_real() {
            return Err(Error::Config(format!("eta must be real and nonzero, got {eta}")));
        }
        Ok(ExoticSeries {
            eta: eta.clone(),
            backend: eta.backend(),
            grades: BTreeMap::new(),
            trunc_k,
        })
    }

    /// Builds a series from `(k, α_k)` pairs. Grades above `trunc_k` are
    /// dropped; repeated grades are summed.
    pub fn from_grades<I>(eta: &ComplexScalar, trunc_k: Trunc, grades: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, LaurentSeries)>,
    {
        let mut out = Self::zero(eta, trunc_k)?;
        for (k, g) in grades {
            out.backend.combine(g.backend())?;
            out.accumulate(k, g)?;
        }
        Ok(out)
    }

    /// A series with a single grade `k`, exact in `x`.
    pub fn monomial(eta: &ComplexScalar, k: u32, alpha: LaurentSeries) -> Result<Self> {
        Self::from_grades(eta, Trunc::Exact, [(k, alpha)])
    }

    /// Constant in `x`: grade 0 only.
    pub fn constant(eta: &ComplexScalar, alpha: LaurentSeries) -> Result<Self> {
        Self::monomial(eta, 0, alpha)
    }

    pub fn one(eta: &ComplexScalar) -> Result<Self> {
        Self::constant(eta, LaurentSeries::one(eta.backend()))
    }

    fn accumulate(&mut self, k: u32, g: LaurentSeries) -> Result<()> {
        if !self.trunc_k.covers(k as i64) {
            return Ok(());
        }
        let next = match self.grades.remove(&k) {
            Some(prev) => prev.add(&g)?,
            None => g,
        };
        if !(next.is_zero() && next.trunc() == Trunc::Exact) {
            self.grades.insert(k, next);
        }
        Ok(())
    }

    pub fn eta(&self) -> &ComplexScalar {
        &self.eta
    }

    pub fn eta_f64(&self) -> f64 {
        self.eta.to_c64().re
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn trunc_k(&self) -> Trunc {
        self.trunc_k
    }

    /// Stored grades. Absent grades at or below `trunc_k` are exactly zero.
    pub fn grades(&self) -> &BTreeMap<u32, LaurentSeries> {
        &self.grades
    }

    pub fn grade(&self, k: u32) -> Option<&LaurentSeries> {
        self.grades.get(&k)
    }

    /// Grade `k`, with an exact zero for absent grades. `None` above `trunc_k`.
    pub fn grade_or_zero(&self, k: u32) -> Option<LaurentSeries> {
        if !self.trunc_k.covers(k as i64) {
            return None;
        }
        Some(
            self.grades
                .get(&k)
                .cloned()
                .unwrap_or_else(|| LaurentSeries::zero(self.backend, Trunc::Exact)),
        )
    }

    /// Lowest grade with a nonzero coefficient.
    pub fn ordx(&self) -> Option<u32> {
        self.grades.iter().find(|(_, g)| !g.is_zero()).map(|(&k, _)| k)
    }

    /// Lowest grade that may be nonzero: the lowest stored grade, or one past
    /// the truncation for a series without stored grades.
    fn ordx_eff(&self) -> Trunc {
        match self.grades.keys().next() {
            Some(&k) => Trunc::At(k as i64),
            None => self.trunc_k.shift(1),
        }
    }

    /// Every retained coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.grades.values().all(LaurentSeries::is_zero)
    }

    fn check(&self, other: &ExoticSeries) -> Result<Backend> {
        let backend = self.backend.combine(other.backend)?;
        if self.eta != other.eta {
            return Err(Error::Config(format!(
                "eta mismatch: {} vs {}",
                self.eta, other.eta
            )));
        }
        Ok(backend)
    }

    fn with_grades(&self, backend: Backend, trunc_k: Trunc, grades: BTreeMap<u32, LaurentSeries>) -> Self {
        ExoticSeries {
            eta: self.eta.convert(backend),
            backend,
            grades: grades
                .into_iter()
                .filter(|(k, g)| trunc_k.covers(*k as i64) && !(g.is_zero() && g.trunc() == Trunc::Exact))
                .collect(),
            trunc_k,
        }
    }

    pub fn add(&self, other: &ExoticSeries) -> Result<ExoticSeries> {
        let backend = self.check(other)?;
        let trunc_k = self.trunc_k.min(other.trunc_k);
        let mut grades = self.grades.clone();
        for (&k, g) in &other.grades {
            let next = match grades.remove(&k) {
                Some(prev) => prev.add(g)?,
                None => g.clone(),
            };
            grades.insert(k, next);
        }
        Ok(self.with_grades(backend, trunc_k, grades))
    }

    pub fn neg(&self) -> ExoticSeries {
        let grades = self.grades.iter().map(|(&k, g)| (k, g.neg())).collect();
        self.with_grades(self.backend, self.trunc_k, grades)
    }

    pub fn sub(&self, other: &ExoticSeries) -> Result<ExoticSeries> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &ComplexScalar) -> Result<ExoticSeries> {
        let backend = self.backend.combine(c.backend())?;
        let grades = self
            .grades
            .iter()
            .map(|(&k, g)| Ok((k, g.scale(c)?)))
            .collect::<Result<_>>()?;
        Ok(self.with_grades(backend, self.trunc_k, grades))
    }

    /// Multiplies every grade by the same series in `t`.
    pub fn scale_laurent(&self, a: &LaurentSeries) -> Result<ExoticSeries> {
        let backend = self.backend.combine(a.backend())?;
        let grades = self
            .grades
            .iter()
            .map(|(&k, g)| Ok((k, g.mul(a)?)))
            .collect::<Result<_>>()?;
        Ok(self.with_grades(backend, self.trunc_k, grades))
    }

    /// Bigraded Cauchy product. Known through
    /// `min(a.trunc_k + ordx b, b.trunc_k + ordx a)`.
    pub fn mul(&self, other: &ExoticSeries) -> Result<ExoticSeries> {
        let backend = self.check(other)?;
        let trunc_k = self
            .trunc_k
            .plus(other.ordx_eff())
            .min(other.trunc_k.plus(self.ordx_eff()));
        let mut grades: BTreeMap<u32, LaurentSeries> = BTreeMap::new();
        for (&i, a) in &self.grades {
            for (&j, b) in &other.grades {
                let k = i + j;
                if !trunc_k.covers(k as i64) {
                    break;
                }
                let p = a.mul(b)?;
                let next = match grades.remove(&k) {
                    Some(prev) => prev.add(&p)?,
                    None => p,
                };
                grades.insert(k, next);
            }
        }
        Ok(self.with_grades(backend, trunc_k, grades))
    }

    pub fn pow(&self, e: u32) -> Result<ExoticSeries> {
        let mut acc = ExoticSeries::one(&self.eta)?;
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The Euler operator `δ = x d/dx`.
    pub fn delta(&self) -> Result<ExoticSeries> {
        self.delta_shift(0)
    }

    /// `δ + m`: grade `k` maps by `α ↦ (k + m) α + iη θ α`.
    pub fn delta_shift(&self, m: i64) -> Result<ExoticSeries> {
        let i_eta = self.eta.mul_i();
        let grades = self
            .grades
            .iter()
            .map(|(&k, g)| {
                let d = g
                    .scale(&self.backend.int(k as i64 + m))?
                    .add(&g.theta().scale(&i_eta)?)?;
                Ok((k, d))
            })
            .collect::<Result<_>>()?;
        Ok(self.with_grades(self.backend, self.trunc_k, grades))
    }

    /// Multiplication by `x^d`. Negative `d` divides and requires the grades
    /// below `-d` to vanish.
    pub fn shift_x(&self, d: i64) -> Result<ExoticSeries> {
        let mut grades = BTreeMap::new();
        for (&k, g) in &self.grades {
            let nk = k as i64 + d;
            if nk < 0 {
                if !g.is_zero() {
                    return Err(Error::Internal(format!(
                        "cannot divide by x^{}: grade {k} is nonzero",
                        -d
                    )));
                }
                continue;
            }
            grades.insert(nk as u32, g.clone());
        }
        let trunc_k = self.trunc_k.shift(d);
        if trunc_k < Trunc::At(-1) {
            return Err(Error::Truncation(format!(
                "dividing by x^{} leaves no known grade",
                -d
            )));
        }
        Ok(self.with_grades(self.backend, trunc_k, grades))
    }

    /// Multiplication by `t^e` in every grade.
    pub fn shift_t(&self, e: i64) -> ExoticSeries {
        let grades = self.grades.iter().map(|(&k, g)| (k, g.shift(e))).collect();
        self.with_grades(self.backend, self.trunc_k, grades)
    }

    /// Keeps grades through `k` and, in each grade, exponents through `l`.
    pub fn truncate(&self, k: Trunc, l: Trunc) -> ExoticSeries {
        let trunc_k = self.trunc_k.min(k);
        let grades = self.grades.iter().map(|(&kk, g)| (kk, g.truncate(l))).collect();
        self.with_grades(self.backend, trunc_k, grades)
    }

    /// Applies `f` to every stored grade.
    pub fn map_grades<F>(&self, mut f: F) -> Result<ExoticSeries>
    where
        F: FnMut(u32, &LaurentSeries) -> Result<LaurentSeries>,
    {
        let grades = self
            .grades
            .iter()
            .map(|(&k, g)| Ok((k, f(k, g)?)))
            .collect::<Result<_>>()?;
        Ok(self.with_grades(self.backend, self.trunc_k, grades))
    }

    pub fn with_trunc_k(&self, trunc_k: Trunc) -> ExoticSeries {
        self.with_grades(self.backend, trunc_k, self.grades.clone())
    }

    pub fn convert(&self, to: Backend) -> ExoticSeries {
        let grades = self.grades.iter().map(|(&k, g)| (k, g.convert(to))).collect();
        self.with_grades(to, self.trunc_k, grades)
    }

    /// `Σ_{k ≤ kmax} α_k(t) x^k` for given numeric `t` and `x`.
    pub fn eval_c64(&self, t: Complex64, x: Complex64, kmax: u32) -> Complex64 {
        self.grades
            .range(..=kmax)
            .map(|(&k, g)| g.eval_c64(t) * x.powi(k as i32))
            .sum()
    }

    pub fn to_record(&self) -> ExoticRecord {
        ExoticRecord {
            eta: self.eta.to_strings()[0].clone(),
            trunc_k: self.trunc_k.finite(),
            grades: self
                .grades
                .iter()
                .map(|(&k, g)| GradeRecord {
                    k,
                    series: g.to_record(),
                })
                .collect(),
        }
    }

    pub fn from_record(rec: &ExoticRecord, backend: Backend) -> Result<ExoticSeries> {
        let eta = backend.rational(&parse_rational(&rec.eta)?);
        let trunc_k = rec.trunc_k.map_or(Trunc::Exact, Trunc::At);
        let grades = rec
            .grades
            .iter()
            .map(|g| Ok((g.k, LaurentSeries::from_record(&g.series, backend)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_grades(&eta, trunc_k, grades)
    }
}

/// Serialized exotic series: `{eta, truncK, grades: [{k, series}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExoticRecord {
    pub eta: String,
    pub trunc_k: Option<i64>,
    pub grades: Vec<GradeRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeRecord {
    pub k: u32,
    pub series: LaurentRecord,
}

/// `(φ, δφ, …, δⁿφ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JetTuple {
    components: Vec<ExoticSeries>,
}

impl JetTuple {
    pub fn new(phi: &ExoticSeries, n: usize) -> Result<Self> {
        let mut components = Vec::with_capacity(n + 1);
        components.push(phi.clone());
        for j in 0..n {
            let next = components[j].delta()?;
            components.push(next);
        }
        Ok(JetTuple { components })
    }

    pub fn order(&self) -> usize {
        self.components.len() - 1
    }

    pub fn components(&self) -> &[ExoticSeries] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &ExoticSeries {
        &self.components[j]
    }
}

/// Builds `(φ, δφ, …, δⁿφ)`.
pub fn make_jet(phi: &ExoticSeries, n: usize) -> Result<JetTuple> {
    JetTuple::new(phi, n)
}

impl fmt::Display for ExoticSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.grades.is_empty() {
            write!(f, "0")?;
        }
        for (n, (k, g)) in self.grades.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{g}]*x^{k}")?;
        }
        match self.trunc_k {
            Trunc::At(k) => write!(f, " + O(x^{})", k + 1),
            Trunc::Exact => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const E: Backend = Backend::Exact;

    fn eta1() -> ComplexScalar {
        E.int(1)
    }

    fn mono(c: ComplexScalar, j: i64) -> LaurentSeries {
        LaurentSeries::monomial(c, j, Trunc::Exact)
    }

    #[test]
    fn delta_on_monomials() {
        let s = ExoticSeries::monomial(&eta1(), 3, mono(E.int(1), 2)).unwrap();
        let d = s.delta().unwrap();
        assert_eq!(d.grade(3).unwrap().coeff(2), E.parse_pair("3", "2").unwrap());
        let c = ExoticSeries::constant(&eta1(), mono(E.int(4), 0)).unwrap();
        assert!(c.delta().unwrap().is_zero());
        let s = ExoticSeries::monomial(&eta1(), 1, mono(E.int(1), -1)).unwrap();
        let d = s.delta().unwrap();
        assert_eq!(d.grade(1).unwrap().coeff(-1), E.parse_pair("1", "-1").unwrap());
    }

    #[test]
    fn mul_monomials_and_identity() {
        let a = ExoticSeries::monomial(&eta1(), 1, mono(E.int(1), -1)).unwrap();
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq, ExoticSeries::monomial(&eta1(), 2, mono(E.int(1), -2)).unwrap());
        let one = ExoticSeries::one(&eta1()).unwrap();
        assert_eq!(a.mul(&one).unwrap(), a);
    }

    #[test]
    fn mul_truncation_in_x() {
        let a = ExoticSeries::from_grades(
            &eta1(),
            Trunc::At(5),
            [(1, mono(E.int(1), 0)), (2, mono(E.int(2), 1))],
        )
        .unwrap();
        let b = ExoticSeries::from_grades(&eta1(), Trunc::At(3), [(0, mono(E.int(1), 0))]).unwrap();
        assert_eq!(a.mul(&b).unwrap().trunc_k(), Trunc::At(4));
    }

    #[test]
    fn jet_of_t() {
        let phi = ExoticSeries::constant(&eta1(), mono(E.int(1), 1)).unwrap();
        let jet = make_jet(&phi, 1).unwrap();
        assert_eq!(jet.component(1).grade(0).unwrap().coeff(1), E.parse_pair("0", "1").unwrap());
        let zero = ExoticSeries::zero(&eta1(), Trunc::At(4)).unwrap();
        let jz = make_jet(&zero, 3).unwrap();
        assert!(jz.components().iter().all(ExoticSeries::is_zero));
    }

    #[test]
    fn shift_x_requires_vanishing_low_grades() {
        let a = ExoticSeries::from_grades(&eta1(), Trunc::At(6), [(2, mono(E.int(1), 0))]).unwrap();
        let b = a.shift_x(-2).unwrap();
        assert_eq!(b.ordx(), Some(0));
        assert_eq!(b.trunc_k(), Trunc::At(4));
        assert!(a.shift_x(-3).is_err());
    }

    #[test]
    fn eta_must_be_nonzero_and_match() {
        assert!(ExoticSeries::zero(&E.int(0), Trunc::Exact).is_err());
        let a = ExoticSeries::one(&eta1()).unwrap();
        let b = ExoticSeries::one(&E.int(2)).unwrap();
        assert!(matches!(a.add(&b), Err(Error::Config(_))));
        assert!(matches!(a.mul(&b), Err(Error::Config(_))));
    }

    #[test]
    fn record_round_trip() {
        let eta = E.parse_real("3/2").unwrap();
        let s = ExoticSeries::from_grades(
            &eta,
            Trunc::At(4),
            [(0, mono(E.int(1), 1)), (3, mono(E.parse_pair("1/2", "1").unwrap(), -3))],
        )
        .unwrap();
        let rec = s.to_record();
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.starts_with("{\"eta\":\"3/2\",\"truncK\":4"));
        let back = ExoticSeries::from_record(&serde_json::from_str(&json).unwrap(), E).unwrap();
        assert_eq!(back, s);
    }
}
