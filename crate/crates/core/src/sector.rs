//! Numeric evaluation of exotic partial sums on sectors of `ℂ ∖ ℝ₊` and
//! empirical convergence diagnostics.
//!
//! The branch of `t = x^{iη}` uses `arg x ∈ (0, 2π)` for `η > 0` and
//! `arg x - 2π ∈ (-2π, 0)` for `η < 0`, so that `|t| = e^{-η arg} < 1`
//! on the whole sector in both cases.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exotic::{make_jet, ExoticSeries};
use crate::fexpr::OdeExpression;
use crate::laurent::Trunc;
use crate::scalar::Complex64;

/// Number of grades in one Cauchy increment `d_K = |Σ_{k=K+1}^{K+5} α_k x^k|`.
pub const INCREMENT_SPAN: u32 = 5;
/// Number of increments used in the ratio fit.
pub const FIT_POINTS: u32 = 5;
/// RMS residual of `log d_K` above which a fit is inconclusive.
pub const FIT_RESIDUAL_MAX: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SectorSpec {
    pub theta_min: f64,
    pub theta_max: f64,
    pub radius: f64,
}

impl SectorSpec {
    pub fn new(theta_min: f64, theta_max: f64, radius: f64) -> Result<SectorSpec> {
        if !(0.0 < theta_min && theta_min < theta_max && theta_max < TAU) {
            return Err(Error::EmptySector {
                lo: theta_min,
                hi: theta_max,
            });
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("sector radius must be positive, got {radius}")));
        }
        Ok(SectorSpec {
            theta_min,
            theta_max,
            radius,
        })
    }

    pub fn contains(&self, x: Complex64) -> bool {
        let a = arg_branch(x);
        x.norm() < self.radius && a > self.theta_min && a < self.theta_max
    }
}

/// `arg x ∈ [0, 2π)`.
pub fn arg_branch(x: Complex64) -> f64 {
    let a = x.arg();
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

fn check_point(x: Complex64) -> Result<f64> {
    if x.norm() == 0.0 {
        return Err(Error::OutsideDomain("x = 0 is the vertex of the sector".into()));
    }
    let a = arg_branch(x);
    if a == 0.0 {
        return Err(Error::OutsideDomain(format!("x = {x} lies on the positive real axis")));
    }
    Ok(a)
}

/// `x^{iη}` on the branch described in the module docs.
pub fn t_of_x(x: Complex64, eta: f64) -> Result<Complex64> {
    let a = check_point(x)?;
    let theta = if eta > 0.0 { a } else { a - TAU };
    let log = Complex64::new(x.norm().ln(), theta);
    Ok((Complex64::new(0.0, eta) * log).exp())
}

/// `Σ_{k ≤ K} α_k(t) x^k`.
pub fn eval_partial_sum(phi: &ExoticSeries, x: Complex64, k: u32) -> Result<Complex64> {
    if !phi.trunc_k().covers(k as i64) {
        return Err(Error::Truncation(format!(
            "partial sum through x^{k} requested, series known through x^{}",
            phi.trunc_k()
        )));
    }
    let t = t_of_x(x, phi.eta_f64())?;
    Ok(phi.eval_c64(t, x, k))
}

/// Arg range realizing `τ < |x^{iη}| < τ'` on the branch.
pub fn sector_for_band(eta: f64, tau: f64, tau_prime: f64, radius: f64) -> Result<SectorSpec> {
    if !(0.0 < tau && tau < tau_prime) {
        return Err(Error::Config(format!("need 0 < tau < tau', got {tau}, {tau_prime}")));
    }
    if eta == 0.0 || !eta.is_finite() {
        return Err(Error::Config("eta must be finite and nonzero".into()));
    }
    let (lo, hi) = if eta > 0.0 {
        ((1.0 / tau_prime).ln() / eta, (1.0 / tau).ln() / eta)
    } else {
        (TAU + tau.ln() / eta.abs(), TAU + tau_prime.ln() / eta.abs())
    };
    if !(lo > 0.0 && hi < TAU) {
        return Err(Error::EmptySector { lo, hi });
    }
    SectorSpec::new(lo, hi, radius)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Verdict {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PointDiagnostic {
    pub x: [f64; 2],
    pub t: [f64; 2],
    pub value: [f64; 2],
    /// Fitted ratio of `d_K ≈ C q^K`; zero when the tail vanishes.
    pub q: f64,
    pub fit_residual: f64,
    pub verdict: Verdict,
    /// `|F(x, jet of the partial sum)|` when an equation was supplied.
    pub residual: Option<f64>,
}

/// Highest grade usable for a partial sum of `φ`.
pub fn top_grade(phi: &ExoticSeries) -> u32 {
    match phi.trunc_k() {
        Trunc::At(k) => k.max(0) as u32,
        Trunc::Exact => phi.grades().keys().next_back().copied().unwrap_or(0) + INCREMENT_SPAN * FIT_POINTS,
    }
}

/// `d_K = |Σ_{k=K+1}^{K+5} α_k(t) x^k|`, computed without cancellation.
pub fn cauchy_increment(phi: &ExoticSeries, t: Complex64, x: Complex64, k: u32) -> f64 {
    (k + 1..=k + INCREMENT_SPAN)
        .map(|j| phi.grade(j).map_or(Complex64::new(0.0, 0.0), |a| a.eval_c64(t) * x.powi(j as i32)))
        .sum::<Complex64>()
        .norm()
}

/// Least-squares fit of `log d_K = a + K log q`; returns `(q, rms residual)`.
pub fn fit_ratio(ks: &[u32], ds: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = ks
        .iter()
        .zip(ds)
        .filter(|(_, d)| **d > 0.0)
        .map(|(k, d)| (*k as f64, d.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rms = (pts
        .iter()
        .map(|p| (p.1 - (my + slope * (p.0 - mx))).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Some((slope.exp(), rms))
}

/// Jet residual `|F(x, y_0, …, y_n)|` with `y_i = δ^i S_K` evaluated at `x`.
pub fn residual_at(f: &OdeExpression, phi: &ExoticSeries, x: Complex64, k: u32) -> Result<f64> {
    let t = t_of_x(x, phi.eta_f64())?;
    let jet = make_jet(&phi.truncate(Trunc::At(k as i64), Trunc::Exact), f.order)?;
    let ys: Vec<Complex64> = jet.components().iter().map(|c| c.eval_c64(t, x, k)).collect();
    Ok(f.eval_c64(x, &ys)?.norm())
}

/// Cauchy-increment diagnostic at one point.
pub fn point_diagnostic(phi: &ExoticSeries, x: Complex64, f: Option<&OdeExpression>) -> Result<PointDiagnostic> {
    let t = t_of_x(x, phi.eta_f64())?;
    let top = top_grade(phi);
    let needed = INCREMENT_SPAN + FIT_POINTS - 1;
    if top < needed {
        return Err(Error::Truncation(format!(
            "the diagnostic needs {needed} grades, series known through x^{top}"
        )));
    }
    let last = top - INCREMENT_SPAN;
    let ks: Vec<u32> = (last + 1 - FIT_POINTS..=last).collect();
    let ds: Vec<f64> = ks.iter().map(|&k| cauchy_increment(phi, t, x, k)).collect();
    let (q, fit_residual, verdict) = if ds.last() == Some(&0.0) {
        (0.0, 0.0, Verdict::Convergent)
    } else {
        match fit_ratio(&ks, &ds) {
            None => (f64::NAN, f64::INFINITY, Verdict::Inconclusive),
            Some((q, res)) if res > FIT_RESIDUAL_MAX => (q, res, Verdict::Inconclusive),
            Some((q, res)) if q < 1.0 => (q, res, Verdict::Convergent),
            Some((q, res)) if q > 1.0 => (q, res, Verdict::Divergent),
            Some((q, res)) => (q, res, Verdict::Inconclusive),
        }
    };
    let value = phi.eval_c64(t, x, top);
    let residual = f.map(|f| residual_at(f, phi, x, top)).transpose()?;
    Ok(PointDiagnostic {
        x: [x.re, x.im],
        t: [t.re, t.im],
        value: [value.re, value.im],
        q,
        fit_residual,
        verdict,
        residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceReport {
    pub sector: SectorSpec,
    pub points: Vec<PointDiagnostic>,
    pub convergent: usize,
    pub divergent: usize,
    pub inconclusive: usize,
    pub max_q: f64,
}

/// Sample grid: `n` radii logarithmic from `R/100` to `0.9 R`, `n` args at
/// cell centers of `(θ_min, θ_max)`.
pub fn sample_grid(sector: &SectorSpec, n: usize) -> Vec<Complex64> {
    let (r0, r1) = (sector.radius / 100.0, 0.9 * sector.radius);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let frac = if n == 1 { 0.5 } else { i as f64 / (n - 1) as f64 };
        let r = r0 * (r1 / r0).powf(frac);
        for j in 0..n {
            let th = sector.theta_min + (j as f64 + 0.5) * (sector.theta_max - sector.theta_min) / n as f64;
            out.push(Complex64::from_polar(r, th));
        }
    }
    out
}

pub fn convergence_diagnostic(
    phi: &ExoticSeries,
    sector: &SectorSpec,
    samples: usize,
    f: Option<&OdeExpression>,
) -> Result<ConvergenceReport> {
    if samples == 0 {
        return Err(Error::Config("samples must be at least 1".into()));
    }
    let points = sample_grid(sector, samples)
        .into_iter()
        .map(|x| point_diagnostic(phi, x, f))
        .collect::<Result<Vec<_>>>()?;
    let count = |v: Verdict| points.iter().filter(|p| p.verdict == v).count();
    Ok(ConvergenceReport {
        sector: sector.clone(),
        convergent: count(Verdict::Convergent),
        divergent: count(Verdict::Divergent),
        inconclusive: count(Verdict::Inconclusive),
        max_q: points.iter().map(|p| p.q).filter(|q| q.is_finite()).fold(0.0, f64::max),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentSeries;
    use crate::scalar::Backend;
    use std::f64::consts::PI;

    const E: Backend = Backend::Exact;

    fn riccati(k: u32) -> ExoticSeries {
        let eta = E.int(1);
        ExoticSeries::from_grades(
            &eta,
            Trunc::At(k as i64),
            (0..=k).map(|j| (j, LaurentSeries::monomial(E.int(1), -(j as i64), Trunc::Exact))),
        )
        .unwrap()
    }

    #[test]
    fn branch_modulus() {
        let eta = E.int(1);
        let phi = ExoticSeries::monomial(&eta, 0, LaurentSeries::monomial(E.int(1), 1, Trunc::Exact)).unwrap();
        let v = eval_partial_sum(&phi, Complex64::new(-0.1, 0.0), 0).unwrap();
        assert!((v.norm() - (-PI).exp()).abs() < 1e-15);
        let one = ExoticSeries::one(&eta).unwrap();
        let v = eval_partial_sum(&one, Complex64::new(0.3, -0.2), 0).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
        assert!(eval_partial_sum(&one, Complex64::new(0.3, 0.0), 0).is_err());
        assert!(eval_partial_sum(&one, Complex64::new(0.0, 0.0), 0).is_err());
        assert!(matches!(
            eval_partial_sum(&riccati(3), Complex64::new(0.0, 0.1), 4),
            Err(Error::Truncation(_))
        ));
        for &eta in &[1.0, 0.5, -1.0, -2.5] {
            for &a in &[0.3, 2.0, 4.0, 6.2] {
                let t = t_of_x(Complex64::from_polar(0.2, a), eta).unwrap();
                let theta = if eta > 0.0 { a } else { a - TAU };
                assert!((t.norm() - (-eta * theta).exp()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn riccati_closed_form() {
        let phi = riccati(30);
        let x = Complex64::from_polar(0.05, PI / 2.0);
        let t = t_of_x(x, 1.0).unwrap();
        let exact = t / (t - x);
        let errs: Vec<f64> = [10, 20, 30]
            .iter()
            .map(|&k| (eval_partial_sum(&phi, x, k).unwrap() - exact).norm())
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
        assert!(errs[2] < 1e-6);
    }

    #[test]
    fn band_sectors() {
        let s = sector_for_band(1.0, (-3.0f64).exp(), (-1.0f64).exp(), 0.1).unwrap();
        assert!((s.theta_min - 1.0).abs() < 1e-14 && (s.theta_max - 3.0).abs() < 1e-14);
        let s = sector_for_band(-1.0, (-3.0f64).exp(), (-1.0f64).exp(), 0.1).unwrap();
        assert!((s.theta_min - (TAU - 3.0)).abs() < 1e-14 && (s.theta_max - (TAU - 1.0)).abs() < 1e-14);
        match sector_for_band(1.0, (-10.0f64).exp(), (-8.0f64).exp(), 0.1) {
            Err(Error::EmptySector { lo, hi }) => {
                assert!((lo - 8.0).abs() < 1e-12 && (hi - 10.0).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
        // the band is realized pointwise
        let (tau, taup) = (0.3, 0.45);
        for &eta in &[1.0, -0.7] {
            let s = sector_for_band(eta, tau, taup, 1.0).unwrap();
            for x in sample_grid(&s, 6) {
                let m = t_of_x(x, eta).unwrap().norm();
                assert!(m > tau && m < taup);
            }
        }
    }

    #[test]
    fn diagnostics() {
        let eta = E.int(1);
        let phi = ExoticSeries::monomial(&eta, 0, LaurentSeries::monomial(E.int(1), 1, Trunc::Exact)).unwrap();
        let s = SectorSpec::new(1.0, 2.0, 0.1).unwrap();
        let rep = convergence_diagnostic(&phi, &s, 3, None).unwrap();
        assert_eq!(rep.convergent, 9);
        let phi = riccati(24);
        let x = Complex64::from_polar(0.01, 1.0);
        let d = point_diagnostic(&phi, x, None).unwrap();
        let ratio = (x / t_of_x(x, 1.0).unwrap()).norm();
        assert!((d.q - ratio).abs() < 1e-9 * ratio);
        assert_eq!(d.verdict, Verdict::Convergent);
        let x = Complex64::from_polar(0.5, 1.0);
        let d = point_diagnostic(&phi, x, None).unwrap();
        assert!(d.q > 1.0);
        assert_eq!(d.verdict, Verdict::Divergent);
    }
}
