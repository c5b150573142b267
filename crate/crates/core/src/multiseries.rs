//! Polynomials in `n + 1` variables whose coefficients are exotic series.
//!
//! With variables `y_0..y_n` this holds the polynomial form of `F`; with
//! variables `u_0..u_n` it holds the remainder `M(t, x, u)` of a reduced
//! equation, where each coefficient carries the `(t, x)` dependence and the
//! flat coefficients `α_{s,p,Q}` are read off by [`MultiSeries::flat_terms`].

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exotic::{ExoticSeries, GradeRecord};
use crate::laurent::{LaurentSeries, Trunc};
use crate::scalar::{parse_rational, Backend, ComplexScalar};

pub type MultiIndex = Vec<u32>;

#[derive(Clone, Debug, PartialEq)]
pub struct MultiSeries {
    eta: ComplexScalar,
    backend: Backend,
    nvars: usize,
    terms: BTreeMap<MultiIndex, ExoticSeries>,
    degree_bound: u32,
}

/// One flat coefficient `α_{s,p,Q} t^s x^p u^Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatTerm {
    pub s: i64,
    pub p: u32,
    pub q: MultiIndex,
    pub coeff: ComplexScalar,
}

pub fn total_degree(q: &[u32]) -> u32 {
    q.iter().sum()
}

impl MultiSeries {
    pub fn zero(eta: &ComplexScalar, nvars: usize, degree_bound: u32) -> Self {
        MultiSeries {
            eta: eta.clone(),
            backend: eta.backend(),
            nvars,
            terms: BTreeMap::new(),
            degree_bound,
        }
    }

    pub fn constant(c: &ExoticSeries, nvars: usize, degree_bound: u32) -> Self {
        let mut out = Self::zero(c.eta(), nvars, degree_bound);
        out.insert(vec![0; nvars], c.clone());
        out
    }

    /// The variable `v_i` itself.
    pub fn var(eta: &ComplexScalar, nvars: usize, i: usize, degree_bound: u32) -> Result<Self> {
        let mut out = Self::zero(eta, nvars, degree_bound);
        let mut q = vec![0; nvars];
        q[i] = 1;
        out.insert(q, ExoticSeries::one(eta)?);
        Ok(out)
    }

    /// Builds from `(Q, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(eta: &ComplexScalar, nvars: usize, degree_bound: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, ExoticSeries)>,
    {
        let mut out = Self::zero(eta, nvars, degree_bound);
        for (q, c) in terms {
            if q.len() != nvars {
                return Err(Error::Shape(format!(
                    "multi-index of length {} in a series of {nvars} variables",
                    q.len()
                )));
            }
            out.add_term(q, c)?;
        }
        Ok(out)
    }

    fn insert(&mut self, q: MultiIndex, c: ExoticSeries) {
        if total_degree(&q) > self.degree_bound {
            return;
        }
        if c.grades().is_empty() && c.trunc_k() == Trunc::Exact {
            return;
        }
        self.terms.insert(q, c);
    }

    fn add_term(&mut self, q: MultiIndex, c: ExoticSeries) -> Result<()> {
        let next = match self.terms.remove(&q) {
            Some(prev) => prev.add(&c)?,
            None => c,
        };
        self.insert(q, next);
        Ok(())
    }

    pub fn eta(&self) -> &ComplexScalar {
        &self.eta
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, ExoticSeries> {
        &self.terms
    }

    pub fn coeff(&self, q: &[u32]) -> Option<&ExoticSeries> {
        self.terms.get(q)
    }

    /// Highest total degree of a term with a nonzero coefficient.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(q, _)| total_degree(q))
            .max()
            .unwrap_or(0)
    }

    /// Every retained coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(ExoticSeries::is_zero)
    }

    fn check(&self, other: &MultiSeries) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Shape(format!(
                "variable count mismatch: {} vs {}",
                self.nvars, other.nvars
            )));
        }
        self.backend.combine(other.backend)?;
        if self.eta != other.eta {
            return Err(Error::Config("eta mismatch".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiSeries) -> Result<MultiSeries> {
        self.check(other)?;
        let mut out = self.clone();
        out.degree_bound = self.degree_bound.min(other.degree_bound);
        out.terms.retain(|q, _| total_degree(q) <= out.degree_bound);
        for (q, c) in &other.terms {
            out.add_term(q.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> MultiSeries {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &MultiSeries) -> Result<MultiSeries> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &ExoticSeries) -> Result<MultiSeries> {
        let mut out = Self::zero(&self.eta, self.nvars, self.degree_bound);
        for (q, a) in &self.terms {
            out.add_term(q.clone(), a.mul(c)?)?;
        }
        Ok(out)
    }

    /// Product, dropping terms above the smaller degree bound.
    pub fn mul(&self, other: &MultiSeries) -> Result<MultiSeries> {
        self.check(other)?;
        let bound = self.degree_bound.min(other.degree_bound);
        let mut out = Self::zero(&self.eta, self.nvars, bound);
        for (qa, a) in &self.terms {
            for (qb, b) in &other.terms {
                let q: MultiIndex = qa.iter().zip(qb).map(|(x, y)| x + y).collect();
                if total_degree(&q) > bound {
                    continue;
                }
                out.add_term(q, a.mul(b)?)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<MultiSeries> {
        let one = ExoticSeries::one(&self.eta)?;
        let mut acc = Self::constant(&one, self.nvars, self.degree_bound);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Formal partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Result<MultiSeries> {
        if i >= self.nvars {
            return Err(Error::Shape(format!("variable index {i} out of range")));
        }
        let mut out = Self::zero(&self.eta, self.nvars, self.degree_bound);
        for (q, c) in &self.terms {
            if q[i] == 0 {
                continue;
            }
            let mut dq = q.clone();
            dq[i] -= 1;
            out.add_term(dq, c.scale(&self.backend.int(q[i] as i64))?)?;
        }
        Ok(out)
    }

    /// Substitutes exotic series for the variables.
    pub fn evaluate(&self, values: &[ExoticSeries]) -> Result<ExoticSeries> {
        if values.len() != self.nvars {
            return Err(Error::Shape(format!(
                "expected {} values, got {}",
                self.nvars,
                values.len()
            )));
        }
        let mut powers: HashMap<(usize, u32), ExoticSeries> = HashMap::new();
        let mut acc = ExoticSeries::zero(&self.eta, Trunc::Exact)?;
        for (q, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in q.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = cached_power(&mut powers, &values[i], i, e)?;
                term = term.mul(&p)?;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Substitutes polynomials (possibly in another set of variables).
    pub fn compose(&self, values: &[MultiSeries]) -> Result<MultiSeries> {
        if values.len() != self.nvars {
            return Err(Error::Shape(format!(
                "expected {} values, got {}",
                self.nvars,
                values.len()
            )));
        }
        let target = values
            .first()
            .ok_or_else(|| Error::Shape("no variables to substitute".into()))?;
        let (nv, bound) = (target.nvars, target.degree_bound);
        let mut powers: HashMap<(usize, u32), MultiSeries> = HashMap::new();
        let mut acc = Self::zero(&self.eta, nv, bound);
        for (q, c) in &self.terms {
            let mut term = Self::constant(c, nv, bound);
            for (i, &e) in q.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let key = (i, e);
                if let Entry::Vacant(slot) = powers.entry(key) {
                    slot.insert(values[i].pow(e)?);
                }
                term = term.mul(&powers[&key])?;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs<F>(&self, mut f: F) -> Result<MultiSeries>
    where
        F: FnMut(&MultiIndex, &ExoticSeries) -> Result<ExoticSeries>,
    {
        let mut out = Self::zero(&self.eta, self.nvars, self.degree_bound);
        for (q, c) in &self.terms {
            out.add_term(q.clone(), f(q, c)?)?;
        }
        Ok(out)
    }

    /// Part of total degree exactly `d` in the variables.
    pub fn homogeneous_part(&self, d: u32) -> MultiSeries {
        let mut out = self.clone();
        out.terms.retain(|q, _| total_degree(q) == d);
        out
    }

    /// Nonzero flat coefficients `α_{s,p,Q}`, sorted by `(Q, p, s)`.
    pub fn flat_terms(&self) -> Vec<FlatTerm> {
        let mut out = Vec::new();
        for (q, c) in &self.terms {
            for (&p, g) in c.grades() {
                for (s, a) in g.terms() {
                    if !a.is_zero() {
                        out.push(FlatTerm {
                            s,
                            p,
                            q: q.clone(),
                            coeff: a.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn to_record(&self) -> MultiRecord {
        MultiRecord {
            nvars: self.nvars,
            degree_bound: self.degree_bound,
            terms: self
                .terms
                .iter()
                .map(|(q, c)| {
                    let rec = c.to_record();
                    MultiTermRecord {
                        q: q.clone(),
                        trunc_k: rec.trunc_k,
                        grades: rec.grades,
                    }
                })
                .collect(),
        }
    }

    pub fn from_record(rec: &MultiRecord, eta: &str, backend: Backend) -> Result<MultiSeries> {
        let eta_s = backend.rational(&parse_rational(eta)?);
        let terms = rec
            .terms
            .iter()
            .map(|t| {
                let grades = t
                    .grades
                    .iter()
                    .map(|g| Ok((g.k, LaurentSeries::from_record(&g.series, backend)?)))
                    .collect::<Result<Vec<_>>>()?;
                let trunc_k = t.trunc_k.map_or(Trunc::Exact, Trunc::At);
                Ok((t.q.clone(), ExoticSeries::from_grades(&eta_s, trunc_k, grades)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(&eta_s, rec.nvars, rec.degree_bound, terms)
    }
}

fn cached_power(
    cache: &mut HashMap<(usize, u32), ExoticSeries>,
    base: &ExoticSeries,
    i: usize,
    e: u32,
) -> Result<ExoticSeries> {
    if let Some(p) = cache.get(&(i, e)) {
        return Ok(p.clone());
    }
    let p = if e == 1 {
        base.clone()
    } else {
        cached_power(cache, base, i, e - 1)?.mul(base)?
    };
    cache.insert((i, e), p.clone());
    Ok(p)
}

/// Serialized multi-series: per multi-index, an exotic series in `(t, x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MultiRecord {
    pub nvars: usize,
    pub degree_bound: u32,
    pub terms: Vec<MultiTermRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MultiTermRecord {
    pub q: MultiIndex,
    pub trunc_k: Option<i64>,
    pub grades: Vec<GradeRecord>,
}

#[cfg(test)]
mod tests {
    use super::*;

    const E: Backend = Backend::Exact;

    fn eta() -> ComplexScalar {
        E.int(1)
    }

    fn c(v: i64) -> ExoticSeries {
        ExoticSeries::constant(&eta(), LaurentSeries::constant(E.int(v), Trunc::Exact)).unwrap()
    }

    #[test]
    fn binomial_square() {
        // (1 + v0)^2 = 1 + 2 v0 + v0^2
        let one = MultiSeries::constant(&c(1), 2, 4);
        let v0 = MultiSeries::var(&eta(), 2, 0, 4).unwrap();
        let sq = one.add(&v0).unwrap().pow(2).unwrap();
        assert_eq!(sq.coeff(&[0, 0]), Some(&c(1)));
        assert_eq!(sq.coeff(&[1, 0]), Some(&c(2)));
        assert_eq!(sq.coeff(&[2, 0]), Some(&c(1)));
        assert_eq!(sq.terms().len(), 3);
    }

    #[test]
    fn degree_bound_drops_high_terms() {
        let v = MultiSeries::var(&eta(), 1, 0, 3).unwrap();
        let p = v.pow(5).unwrap();
        assert!(p.terms().is_empty());
        assert!(v.pow(3).unwrap().coeff(&[3]).is_some());
    }

    #[test]
    fn derivative_and_evaluate() {
        // p = 3 v0^2 v1 ; dp/dv0 = 6 v0 v1
        let v0 = MultiSeries::var(&eta(), 2, 0, 5).unwrap();
        let v1 = MultiSeries::var(&eta(), 2, 1, 5).unwrap();
        let p = v0.pow(2).unwrap().mul(&v1).unwrap().scale(&c(3)).unwrap();
        let d = p.derivative(0).unwrap();
        assert_eq!(d.coeff(&[1, 1]), Some(&c(6)));
        let val = p.evaluate(&[c(2), c(5)]).unwrap();
        assert_eq!(val, c(60));
    }

    #[test]
    fn compose_shift() {
        // p(y) = y^2, y = 1 + u  ->  1 + 2u + u^2
        let y = MultiSeries::var(&eta(), 1, 0, 4).unwrap();
        let p = y.pow(2).unwrap();
        let shifted = MultiSeries::constant(&c(1), 1, 4).add(&y).unwrap();
        let q = p.compose(&[shifted]).unwrap();
        assert_eq!(q.coeff(&[1]), Some(&c(2)));
        assert_eq!(q.flat_terms().len(), 3);
    }

    #[test]
    fn record_round_trip() {
        let v0 = MultiSeries::var(&eta(), 2, 0, 4).unwrap();
        let p = v0.scale(&c(7)).unwrap().add(&MultiSeries::constant(&c(-2), 2, 4)).unwrap();
        let rec = p.to_record();
        let json = serde_json::to_string(&rec).unwrap();
        let back = MultiSeries::from_record(&serde_json::from_str(&json).unwrap(), "1", E).unwrap();
        assert_eq!(back, p);
    }
}
