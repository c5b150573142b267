//! The unique exotic solution `ψ = Σ_{k≥1} c_k(t) x^k` of a reduced equation.
//!
//! Grade `k` of `t^r Σ A_i(t)(δ+m)^i u = x M` reads
//!
//! ```text
//! Σ_j [ L(k+m+iηj) c_{k,j} + Σ_{s≥1} Σ_i a_{i,s} (k+m+iη(j-s))^i c_{k,j-s} ] t^{j+r}
//!     = [x^{k-1}] M(t, x, U(ψ_{<k}))
//! ```
//!
//! which is triangular in `j`: the diagonal is `L(k+m+iηj)` and the
//! `t`-dependent parts of `A_i` only reach back to lower exponents.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::exotic::ExoticSeries;
use crate::laurent::{LaurentSeries, Trunc};
use crate::multiseries::MultiIndex;
use crate::reduction::ReducedEquation;
use crate::roots::eval_poly;
use crate::scalar::ComplexScalar;

/// Diagnostic record of one grade of the recursion.
#[derive(Clone, Debug, PartialEq)]
pub struct FuchsianStep {
    pub k: u32,
    /// Slot pole order of `c_k`.
    pub nu_k: i64,
    /// `L(k + m + iηj)` for every exponent `j` solved.
    pub diag_values: BTreeMap<i64, ComplexScalar>,
    /// `[x^{k-1}] M(t, x, U(ψ_{<k}))`.
    pub rhs: LaurentSeries,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub psi: ExoticSeries,
    pub steps: Vec<FuchsianStep>,
    /// Grades whose right side had a deeper pole than `k r`, with the pole
    /// order actually used.
    pub deviations: Vec<(u32, i64)>,
}

/// `(k + m + iηj)` for the exponent `j` in grade `k`.
fn lattice_point(eq: &ReducedEquation, k: u32, j: i64) -> ComplexScalar {
    let b = eq.backend();
    &b.int(k as i64 + eq.m as i64) + &eq.eta.mul_i().mul_int(j)
}

fn powers(z: &ComplexScalar, n: usize) -> Vec<ComplexScalar> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(z.backend().one());
    for i in 1..=n {
        let next = &out[i - 1] * z;
        out.push(next);
    }
    out
}

/// Incremental products `Π_i U_i^{q_i}` grade by grade.
struct PowerTable<'a> {
    u: &'a [BTreeMap<u32, LaurentSeries>],
    cache: HashMap<(MultiIndex, u32), LaurentSeries>,
    backend: crate::scalar::Backend,
}

impl PowerTable<'_> {
    fn grade(&mut self, q: &MultiIndex, g: u32) -> Result<LaurentSeries> {
        let deg: u32 = q.iter().sum();
        if deg == 0 {
            return Ok(if g == 0 {
                LaurentSeries::one(self.backend)
            } else {
                LaurentSeries::zero(self.backend, Trunc::Exact)
            });
        }
        if g < deg {
            return Ok(LaurentSeries::zero(self.backend, Trunc::Exact));
        }
        if let Some(v) = self.cache.get(&(q.clone(), g)) {
            return Ok(v.clone());
        }
        let i = q.iter().position(|&e| e > 0).unwrap();
        let mut rest = q.clone();
        rest[i] -= 1;
        let mut acc = LaurentSeries::zero(self.backend, Trunc::Exact);
        for g1 in 1..=g - (deg - 1) {
            let Some(ui) = self.u[i].get(&g1) else {
                continue;
            };
            let tail = self.grade(&rest, g - g1)?;
            if tail.is_zero() && tail.trunc() == Trunc::Exact {
                continue;
            }
            acc = acc.add(&ui.mul(&tail)?)?;
        }
        self.cache.insert((q.clone(), g), acc.clone());
        Ok(acc)
    }
}

/// Solves for `c_1, …, c_K`, each through exponent `L - k r`.
pub fn solve_coefficients(eq: &ReducedEquation, k_max: u32, l: i64) -> Result<Solution> {
    if k_max < 1 || l < 1 {
        return Err(Error::Config("K and L must be at least 1".into()));
    }
    let backend = eq.backend();
    let n = eq.order();
    let r = eq.r;
    let tol = backend.zero_tol();
    let mut u: Vec<BTreeMap<u32, LaurentSeries>> = vec![BTreeMap::new(); n + 1];
    let mut grades: Vec<(u32, LaurentSeries)> = Vec::new();
    let mut steps = Vec::new();
    let mut deviations = Vec::new();
    // flat view of M: (Q, p, t-series)
    let m_terms: Vec<(MultiIndex, u32, LaurentSeries)> = eq
        .m_series
        .terms()
        .iter()
        .flat_map(|(q, c)| c.grades().iter().map(move |(&p, g)| (q.clone(), p, g.clone())))
        .collect();
    let m_trunc_k = eq
        .m_series
        .terms()
        .values()
        .map(ExoticSeries::trunc_k)
        .min()
        .unwrap_or(Trunc::Exact);

    for k in 1..=k_max {
        if !m_trunc_k.covers(k as i64 - 1) {
            return Err(Error::Truncation(format!(
                "M is known through x^{m_trunc_k} but grade {k} needs x^{}",
                k - 1
            )));
        }
        let rhs = {
            let mut table = PowerTable {
                u: &u,
                cache: HashMap::new(),
                backend,
            };
            let mut acc = LaurentSeries::zero(backend, Trunc::Exact);
            for (q, p, coeff) in &m_terms {
                if *p > k - 1 {
                    continue;
                }
                let prod = table.grade(q, k - 1 - p)?;
                if prod.is_zero() && prod.trunc() == Trunc::Exact {
                    continue;
                }
                acc = acc.add(&coeff.mul(&prod)?)?;
            }
            acc
        };
        let nu_k = k as i64 * r;
        let mut j_start = -nu_k;
        if let Some(o) = rhs.ord() {
            if o - r < j_start {
                j_start = o - r;
                deviations.push((k, -j_start));
            }
        }
        let j_end = l - nu_k;
        if !rhs.trunc().covers(j_end + r) {
            return Err(Error::Truncation(format!(
                "grade {k} needs the right side through t^{} but it is known through t^{}",
                j_end + r,
                rhs.trunc()
            )));
        }
        for (i, a) in eq.a.iter().enumerate() {
            if !a.trunc().covers(j_end - j_start) {
                return Err(Error::Truncation(format!(
                    "A_{i} is known through t^{} but grade {k} needs t^{}",
                    a.trunc(),
                    j_end - j_start
                )));
            }
        }
        let zpow: Vec<Vec<ComplexScalar>> = (j_start..=j_end)
            .map(|j| powers(&lattice_point(eq, k, j), n))
            .collect();
        let mut c: Vec<ComplexScalar> = Vec::with_capacity((j_end - j_start + 1).max(0) as usize);
        let mut diag_values = BTreeMap::new();
        for j in j_start..=j_end {
            let idx = (j - j_start) as usize;
            let diag = eval_poly(&eq.lcoeffs, &lattice_point(eq, k, j));
            let scale: f64 = eq
                .lcoeffs
                .iter()
                .zip(&zpow[idx])
                .map(|(a, z)| a.abs_f64() * z.abs_f64())
                .sum();
            if diag.is_zero() || (!backend.is_exact() && diag.abs_f64() <= tol * scale.max(1.0)) {
                return Err(Error::Lattice { k: k as i64, j });
            }
            let mut acc = rhs.coeff(j + r);
            for s in 1..=idx {
                let prev = &c[idx - s];
                if prev.is_zero() {
                    continue;
                }
                for (i, a) in eq.a.iter().enumerate() {
                    let Some(ais) = a.coeff_ref(s as i64) else {
                        continue;
                    };
                    if ais.is_zero() {
                        continue;
                    }
                    acc = &acc - &(&(ais * &zpow[idx - s][i]) * prev);
                }
            }
            let cj = acc.checked_div(&diag).ok_or(Error::Lattice { k: k as i64, j })?;
            diag_values.insert(j, diag);
            c.push(cj);
        }
        let ck = LaurentSeries::from_coeffs(backend, j_start, c, Trunc::At(j_end))?;
        // U_i grade k = (k + m + iηθ)^i c_k
        let mut cur = ck.clone();
        for ui in u.iter_mut() {
            if !(cur.is_zero() && cur.trunc() == Trunc::Exact) {
                ui.insert(k, cur.clone());
            }
            cur = cur
                .scale(&backend.int(k as i64 + eq.m as i64))?
                .add(&cur.theta().scale(&eq.eta.mul_i())?)?;
        }
        steps.push(FuchsianStep {
            k,
            nu_k: -j_start,
            diag_values,
            rhs,
        });
        grades.push((k, ck));
    }
    let psi = ExoticSeries::from_grades(&eq.eta, Trunc::At(k_max as i64), grades)?;
    Ok(Solution {
        psi,
        steps,
        deviations,
    })
}

/// `U_i = (δ + m)^i u` for `i = 0..=n`.
pub fn jet_shifted(eq: &ReducedEquation, u: &ExoticSeries) -> Result<Vec<ExoticSeries>> {
    let mut out = vec![u.clone()];
    for i in 0..eq.order() {
        let next = out[i].delta_shift(eq.m as i64)?;
        out.push(next);
    }
    Ok(out)
}

/// `t^r Σ A_i(t) (δ + m)^i u`.
pub fn apply_reduced_lhs(eq: &ReducedEquation, u: &ExoticSeries) -> Result<ExoticSeries> {
    let us = jet_shifted(eq, u)?;
    let mut acc = ExoticSeries::zero(&eq.eta, Trunc::Exact)?;
    for (a, ui) in eq.a.iter().zip(&us) {
        acc = acc.add(&ui.scale_laurent(a)?)?;
    }
    Ok(acc.shift_t(eq.r))
}

/// `x M(t, x, U(u))`.
pub fn reduced_rhs(eq: &ReducedEquation, u: &ExoticSeries) -> Result<ExoticSeries> {
    let us = jet_shifted(eq, u)?;
    eq.m_series.evaluate(&us)?.shift_x(1)
}

/// Left side minus right side; zero to truncation for a solution.
pub fn residual(eq: &ReducedEquation, u: &ExoticSeries) -> Result<ExoticSeries> {
    apply_reduced_lhs(eq, u)?.sub(&reduced_rhs(eq, u)?)
}
