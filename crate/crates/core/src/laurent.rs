//! Truncated Laurent series in `t` with per-series truncation bookkeeping.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Backend, Complex64, ComplexScalar};

/// Highest exponent known exactly. `Exact` marks a finite expression
/// (a polynomial or Laurent polynomial) that is known to all orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Trunc {
    At(i64),
    Exact,
}

impl Ord for Trunc {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Trunc::At(a), Trunc::At(b)) => a.cmp(b),
            (Trunc::At(_), Trunc::Exact) => Ordering::Less,
            (Trunc::Exact, Trunc::At(_)) => Ordering::Greater,
            (Trunc::Exact, Trunc::Exact) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Trunc {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Trunc {
    pub fn shift(self, d: i64) -> Trunc {
        match self {
            Trunc::At(t) => Trunc::At(t + d),
            Trunc::Exact => Trunc::Exact,
        }
    }

    /// Sum of two orders, `Exact` absorbing.
    pub fn plus(self, other: Trunc) -> Trunc {
        match (self, other) {
            (Trunc::At(a), Trunc::At(b)) => Trunc::At(a + b),
            _ => Trunc::Exact,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Trunc::At(t) => Some(t),
            Trunc::Exact => None,
        }
    }

    /// Whether the coefficient of exponent `j` is known.
    pub fn covers(self, j: i64) -> bool {
        match self {
            Trunc::At(t) => j <= t,
            Trunc::Exact => true,
        }
    }
}

impl fmt::Display for Trunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trunc::At(t) => write!(f, "{t}"),
            Trunc::Exact => write!(f, "exact"),
        }
    }
}

/// `Σ_{j ≥ start} c_j t^j`, known through exponent `trunc`.
///
/// Stored densely from the leading nonzero coefficient to the last nonzero
/// one; exponents in `(start + len, trunc]` are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    backend: Backend,
    start: i64,
    coeffs: Vec<ComplexScalar>,
    trunc: Trunc,
}

impl LaurentSeries {
    pub fn zero(backend: Backend, trunc: Trunc) -> Self {
        LaurentSeries {
            backend,
            start: 0,
            coeffs: Vec::new(),
            trunc,
        }
    }

    pub fn one(backend: Backend) -> Self {
        Self::constant(backend.one(), Trunc::Exact)
    }

    pub fn constant(c: ComplexScalar, trunc: Trunc) -> Self {
        Self::monomial(c, 0, trunc)
    }

    pub fn monomial(c: ComplexScalar, j: i64, trunc: Trunc) -> Self {
        let backend = c.backend();
        Self::normalized(backend, j, vec![c], trunc)
    }

    /// Builds a series from coefficients of `t^start, t^{start+1}, ...`,
    /// dropping anything above `trunc` and trimming negligible ends.
    pub fn from_coeffs(
        backend: Backend,
        start: i64,
        coeffs: Vec<ComplexScalar>,
        trunc: Trunc,
    ) -> Result<Self> {
        for c in &coeffs {
            if backend.combine(c.backend()).is_err() {
                return Err(Error::Config(format!(
                    "coefficient backend {} does not match series backend {}",
                    c.backend().name(),
                    backend.name()
                )));
            }
        }
        Ok(Self::normalized(backend, start, coeffs, trunc))
    }

    fn normalized(backend: Backend, start: i64, mut coeffs: Vec<ComplexScalar>, trunc: Trunc) -> Self {
        if let Trunc::At(t) = trunc {
            let keep = (t - start + 1).clamp(0, coeffs.len() as i64) as usize;
            coeffs.truncate(keep);
        }
        let tol = backend.zero_tol();
        while coeffs.last().is_some_and(|c| c.is_negligible(tol)) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_negligible(tol)).count();
        if lead == coeffs.len() {
            return Self::zero(backend, trunc);
        }
        coeffs.drain(..lead);
        LaurentSeries {
            backend,
            start: start + lead as i64,
            coeffs,
            trunc,
        }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn trunc(&self) -> Trunc {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent of the leading nonzero term; `None` for a zero series.
    pub fn ord(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.start)
    }

    /// Leading exponent, or the first unknown exponent for a series that is
    /// zero to its truncation; `Exact` for the exact zero series.
    pub fn ord_eff(&self) -> Trunc {
        match self.ord() {
            Some(s) => Trunc::At(s),
            None => self.trunc.shift(1),
        }
    }

    /// `max(0, -ord)`: the number of negative powers.
    pub fn pole_order(&self) -> i64 {
        self.ord().map_or(0, |s| (-s).max(0))
    }

    /// Last stored exponent (the highest nonzero term).
    pub fn max_exp(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.start + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, j: i64) -> ComplexScalar {
        self.coeff_ref(j).cloned().unwrap_or_else(|| self.backend.zero())
    }

    pub fn coeff_ref(&self, j: i64) -> Option<&ComplexScalar> {
        if j < self.start {
            return None;
        }
        self.coeffs.get((j - self.start) as usize)
    }

    pub fn leading(&self) -> Option<&ComplexScalar> {
        self.coeffs.first()
    }

    /// Stored `(exponent, coefficient)` pairs, zero interior entries included.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &ComplexScalar)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(n, c)| (self.start + n as i64, c))
    }

    fn check(&self, other: &LaurentSeries) -> Result<Backend> {
        self.backend.combine(other.backend)
    }

    pub fn add(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.add_signed(other, false)
    }

    pub fn sub(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        self.add_signed(other, true)
    }

    fn add_signed(&self, other: &LaurentSeries, negate: bool) -> Result<LaurentSeries> {
        let backend = self.check(other)?;
        let trunc = self.trunc.min(other.trunc);
        let other_neg;
        let other = if negate {
            other_neg = other.neg();
            &other_neg
        } else {
            other
        };
        if self.is_zero() {
            return Ok(other.with_backend_trunc(backend, trunc));
        }
        if other.is_zero() {
            return Ok(self.with_backend_trunc(backend, trunc));
        }
        let lo = self.start.min(other.start);
        let hi = self.max_exp().unwrap().max(other.max_exp().unwrap());
        let coeffs = (lo..=hi)
            .map(|j| match (self.coeff_ref(j), other.coeff_ref(j)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => backend.zero(),
            })
            .collect();
        Ok(Self::normalized(backend, lo, coeffs, trunc))
    }

    fn with_backend_trunc(&self, backend: Backend, trunc: Trunc) -> LaurentSeries {
        Self::normalized(backend, self.start, self.coeffs.clone(), trunc)
    }

    pub fn neg(&self) -> LaurentSeries {
        LaurentSeries {
            backend: self.backend,
            start: self.start,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            trunc: self.trunc,
        }
    }

    pub fn scale(&self, c: &ComplexScalar) -> Result<LaurentSeries> {
        let backend = self.backend.combine(c.backend())?;
        if c.is_zero() {
            return Ok(Self::zero(backend, Trunc::Exact));
        }
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        Ok(Self::normalized(backend, self.start, coeffs, self.trunc))
    }

    /// Cauchy product. The result is known through
    /// `min(a.trunc + ord b, b.trunc + ord a)`.
    pub fn mul(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        let backend = self.check(other)?;
        let trunc = self
            .trunc
            .plus(other.ord_eff())
            .min(other.trunc.plus(self.ord_eff()));
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(backend, trunc));
        }
        let start = self.start + other.start;
        let mut len = self.coeffs.len() + other.coeffs.len() - 1;
        if let Trunc::At(t) = trunc {
            len = len.min((t - start + 1).max(0) as usize);
        }
        let mut out: Vec<ComplexScalar> = vec![backend.zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Ok(Self::normalized(backend, start, out, trunc))
    }

    pub fn pow(&self, e: u32) -> Result<LaurentSeries> {
        let mut acc = LaurentSeries::one(self.backend);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `t d/dt`: maps `c t^j` to `j c t^j`.
    pub fn theta(&self) -> LaurentSeries {
        let coeffs = self
            .terms()
            .map(|(j, c)| c.mul_int(j))
            .collect();
        Self::normalized(self.backend, self.start, coeffs, self.trunc)
    }

    /// Multiplication by `t^e`.
    pub fn shift(&self, e: i64) -> LaurentSeries {
        LaurentSeries {
            backend: self.backend,
            start: self.start + e,
            coeffs: self.coeffs.clone(),
            trunc: self.trunc.shift(e),
        }
    }

    /// Forgets everything above exponent `t` (no-op if already coarser).
    pub fn truncate(&self, t: Trunc) -> LaurentSeries {
        Self::normalized(self.backend, self.start, self.coeffs.clone(), self.trunc.min(t))
    }

    /// Overrides the truncation order without touching the coefficients.
    /// Used when a series is known to be exact beyond its nominal order.
    pub fn with_trunc(&self, t: Trunc) -> LaurentSeries {
        Self::normalized(self.backend, self.start, self.coeffs.clone(), t)
    }

    pub fn convert(&self, to: Backend) -> LaurentSeries {
        let coeffs = self.coeffs.iter().map(|c| c.convert(to)).collect();
        Self::normalized(to, self.start, coeffs, self.trunc)
    }

    /// Multiplicative inverse. A truncated input of leading order `s`
    /// known through `T` yields an inverse known through `T - 2s`.
    pub fn invert(&self) -> Result<LaurentSeries> {
        let c0 = self
            .leading()
            .ok_or_else(|| Error::Singular("cannot invert a series that vanishes to its truncation".into()))?;
        let inv0 = c0
            .inv()
            .ok_or_else(|| Error::Singular("leading coefficient is zero".into()))?;
        let s = self.start;
        if self.coeffs.len() == 1 {
            return Ok(Self::normalized(self.backend, -s, vec![inv0], self.trunc.shift(-2 * s)));
        }
        let Trunc::At(t) = self.trunc else {
            return Err(Error::Truncation(
                "the inverse of an exact non-monomial series has infinitely many terms; truncate it first"
                    .into(),
            ));
        };
        let rel = t - s;
        let mut b: Vec<ComplexScalar> = Vec::with_capacity(rel as usize + 1);
        b.push(inv0.clone());
        for n in 1..=rel {
            let mut acc = self.backend.zero();
            for j in 1..=n {
                if let Some(a) = self.coeff_ref(s + j) {
                    if !a.is_zero() {
                        acc = &acc + &(a * &b[(n - j) as usize]);
                    }
                }
            }
            b.push(-&(&acc * &inv0));
        }
        Ok(Self::normalized(self.backend, -s, b, Trunc::At(t - 2 * s)))
    }

    /// Inverse after truncating at `t`.
    pub fn invert_to(&self, t: i64) -> Result<LaurentSeries> {
        self.truncate(Trunc::At(t)).invert()
    }

    pub fn eval_c64(&self, t: Complex64) -> Complex64 {
        self.terms()
            .map(|(j, c)| c.to_c64() * t.powi(j as i32))
            .sum()
    }

    /// Largest coefficient-wise distance to another series over the stored
    /// range of both; used for float comparisons.
    pub fn max_abs_diff(&self, other: &LaurentSeries) -> f64 {
        let lo = self.start.min(other.start);
        let hi = self
            .max_exp()
            .unwrap_or(lo)
            .max(other.max_exp().unwrap_or(lo));
        (lo..=hi)
            .map(|j| (self.coeff(j).to_c64() - other.coeff(j).convert(self.backend).to_c64()).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_record(&self) -> LaurentRecord {
        LaurentRecord {
            pole_order: self.ord().map_or(0, |s| -s),
            trunc_order: self.trunc.finite(),
            coeffs: self.coeffs.iter().map(|c| c.to_strings()).collect(),
        }
    }

    pub fn from_record(rec: &LaurentRecord, backend: Backend) -> Result<LaurentSeries> {
        let coeffs = rec
            .coeffs
            .iter()
            .map(|[re, im]| backend.parse_pair(re, im))
            .collect::<Result<Vec<_>>>()?;
        let trunc = rec.trunc_order.map_or(Trunc::Exact, Trunc::At);
        Ok(Self::normalized(backend, -rec.pole_order, coeffs, trunc))
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")?;
        }
        let mut first = true;
        for (j, c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*t^{j}")?;
        }
        match self.trunc {
            Trunc::At(t) => write!(f, " + O(t^{})", t + 1),
            Trunc::Exact => Ok(()),
        }
    }
}

/// Serialized form of a Laurent series.
///
/// `truncOrder` is `null` for a series known to all orders. Exact
/// coefficients are written as `p/q` strings, float ones as decimals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LaurentRecord {
    pub pole_order: i64,
    pub trunc_order: Option<i64>,
    pub coeffs: Vec<[String; 2]>,
}

#[cfg(test)]
mod tests {
    use super::*;

    const E: Backend = Backend::Exact;

    fn s(start: i64, cs: &[i64], trunc: Trunc) -> LaurentSeries {
        LaurentSeries::from_coeffs(E, start, cs.iter().map(|&c| E.int(c)).collect(), trunc).unwrap()
    }

    #[test]
    fn add_cancels_and_doubles() {
        let a = s(-1, &[1, 1], Trunc::At(5));
        let b = s(-1, &[-1], Trunc::At(5));
        assert_eq!(a.add(&b).unwrap(), s(0, &[1], Trunc::At(5)));
        let z = LaurentSeries::zero(E, Trunc::Exact);
        assert_eq!(a.add(&z).unwrap(), a);
        let c = s(0, &[1, 1], Trunc::At(4));
        assert_eq!(c.add(&c).unwrap(), s(0, &[2, 2], Trunc::At(4)));
    }

    #[test]
    fn add_takes_min_truncation() {
        let a = s(0, &[1, 2, 3], Trunc::At(8));
        let b = s(0, &[1], Trunc::At(1));
        let r = a.add(&b).unwrap();
        assert_eq!(r.trunc(), Trunc::At(1));
        assert_eq!(r, s(0, &[2, 2], Trunc::At(1)));
    }

    #[test]
    fn mul_monomials_and_difference_of_squares() {
        let a = s(-1, &[1], Trunc::Exact);
        assert_eq!(a.mul(&a).unwrap(), s(-2, &[1], Trunc::Exact));
        let p = s(0, &[1, 1], Trunc::Exact);
        let m = s(0, &[1, -1], Trunc::Exact);
        assert_eq!(p.mul(&m).unwrap(), s(0, &[1, 0, -1], Trunc::Exact));
        let pt = s(0, &[1, 1], Trunc::At(1));
        assert_eq!(pt.mul(&m).unwrap(), s(0, &[1], Trunc::At(1)));
    }

    #[test]
    fn mul_truncation_is_conservative() {
        let a = s(-2, &[1, 1], Trunc::At(3));
        let b = s(1, &[1], Trunc::At(6));
        // min(3 + 1, 6 - 2) = 4
        assert_eq!(a.mul(&b).unwrap().trunc(), Trunc::At(4));
        let z = LaurentSeries::zero(E, Trunc::At(2));
        assert_eq!(a.mul(&z).unwrap().trunc(), Trunc::At(0));
    }

    #[test]
    fn theta_scales_by_exponent() {
        assert_eq!(s(3, &[1], Trunc::Exact).theta(), s(3, &[3], Trunc::Exact));
        assert!(s(0, &[7], Trunc::Exact).theta().is_zero());
        let a = s(-2, &[1, 0, 0, 5], Trunc::At(4));
        assert_eq!(a.theta(), s(-2, &[-2, 0, 0, 5], Trunc::At(4)));
        let b = s(0, &[4, 1], Trunc::Exact);
        assert_eq!(b.theta().ord(), Some(1));
    }

    #[test]
    fn invert_geometric_and_monomial() {
        let a = s(0, &[1, -1], Trunc::At(6));
        assert_eq!(a.invert().unwrap(), s(0, &[1; 7], Trunc::At(6)));
        assert_eq!(s(1, &[1], Trunc::Exact).invert().unwrap(), s(-1, &[1], Trunc::Exact));
        let b = s(0, &[2, 1], Trunc::At(10));
        let prod = b.mul(&b.invert().unwrap()).unwrap();
        assert_eq!(prod, s(0, &[1], Trunc::At(10)));
        assert!(matches!(
            s(0, &[2, 1], Trunc::Exact).invert(),
            Err(Error::Truncation(_))
        ));
        assert!(matches!(
            LaurentSeries::zero(E, Trunc::At(3)).invert(),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn invert_shifted_truncation() {
        let a = s(-2, &[1, 3, 1], Trunc::At(4));
        let inv = a.invert().unwrap();
        assert_eq!(inv.ord(), Some(2));
        assert_eq!(inv.trunc(), Trunc::At(8));
        let back = a.mul(&inv).unwrap();
        assert_eq!(back, s(0, &[1], Trunc::At(6)));
        let twice = inv.invert().unwrap();
        assert_eq!(twice, a.truncate(Trunc::At(4)));
    }

    #[test]
    fn backend_mismatch_is_config_error() {
        let f = LaurentSeries::one(Backend::Float { bits: 64 });
        let e = LaurentSeries::one(E);
        assert!(matches!(f.add(&e), Err(Error::Config(_))));
        assert!(matches!(f.mul(&e), Err(Error::Config(_))));
    }

    #[test]
    fn float_normalization_drops_negligible_leading() {
        let fb = Backend::Float { bits: 128 };
        let tiny = fb.parse_real("1e-40").unwrap();
        let a = LaurentSeries::from_coeffs(fb, -1, vec![tiny, fb.int(2)], Trunc::At(3)).unwrap();
        assert_eq!(a.ord(), Some(0));
    }

    #[test]
    fn record_round_trip() {
        let a = LaurentSeries::from_coeffs(
            E,
            -2,
            vec![E.parse_pair("1/3", "-2").unwrap(), E.zero(), E.int(5)],
            Trunc::At(7),
        )
        .unwrap();
        let rec = a.to_record();
        assert_eq!(rec.pole_order, 2);
        assert_eq!(rec.trunc_order, Some(7));
        assert_eq!(rec.coeffs[0], ["1/3".to_string(), "-2".to_string()]);
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("\"poleOrder\":2"));
        let back = LaurentSeries::from_record(&serde_json::from_str(&json).unwrap(), E).unwrap();
        assert_eq!(back, a);
    }
}
