//! The majorant equation `t^r σ v = t^{r+1} H̃(t, v) + x M̃(t, x, v)`, its
//! formal solution `Σ C_k(t) x^k`, entrywise dominance over `ψ`, the bound
//! `𝓜` and the fixed-point form `v = (t/σ) H̃ + x M̃ / (σ t^r)`.
//!
//! Real coefficients are kept in `f64`: every quantity here is a bound, and
//! the certified inequalities carry explicit slack.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exotic::ExoticSeries;
use crate::laurent::Trunc;
use crate::multiseries::total_degree;
use crate::reduction::ReducedEquation;
use crate::roots::eval_poly_c64;
use crate::scalar::{Complex64, ComplexScalar};

/// Absolute slack allowed in dominance comparisons.
pub const DOMINANCE_SLACK: f64 = 1e-12;
/// Margin of the nondegeneracy test `|1 - a(t0)| > margin`.
pub const NONDEGENERACY_MARGIN: f64 = 1e-8;
/// Relative stopping tolerance of the Picard iteration.
pub const PICARD_TOL: f64 = 1e-12;

/// `L` coefficients and the table `h_{s,i} = -[t^{s+1}] A_i(t)`, so that
/// `Σ A_i(t) z^i = L(z) - t Σ_{s,i} h_{s,i} t^s z^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LhsSplit {
    pub lcoeffs: Vec<ComplexScalar>,
    /// `h[s][i]`.
    pub h: Vec<Vec<ComplexScalar>>,
    /// Highest `s` for which `h_{s,i}` is known.
    pub known_s: Trunc,
}

pub fn split_lhs(eq: &ReducedEquation) -> LhsSplit {
    let n = eq.order();
    let smax = eq
        .a
        .iter()
        .filter_map(|a| a.max_exp())
        .max()
        .unwrap_or(0)
        .max(1)
        - 1;
    let h = (0..=smax)
        .map(|s| (0..=n).map(|i| -&eq.a[i].coeff(s + 1)).collect())
        .collect::<Vec<Vec<ComplexScalar>>>();
    let known_s = eq
        .a
        .iter()
        .map(|a| a.trunc().shift(-1))
        .min()
        .unwrap_or(Trunc::Exact);
    let h = trim_zero_rows(h);
    LhsSplit {
        lcoeffs: eq.lcoeffs.clone(),
        h,
        known_s,
    }
}

fn trim_zero_rows(mut h: Vec<Vec<ComplexScalar>>) -> Vec<Vec<ComplexScalar>> {
    while h.last().is_some_and(|row| row.iter().all(ComplexScalar::is_zero)) {
        h.pop();
    }
    h
}

/// Result of the lattice minimization defining `σ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Sigma {
    pub sigma: f64,
    /// Minimizing lattice point `(k, ℓ)`.
    pub argmin: (u32, i64),
    /// Radius beyond which the tail bound certifies `|L(z)| ≥ σ`.
    pub radius: f64,
    /// Number of lattice points evaluated.
    pub evaluated: usize,
}

/// Tail lower bound `|a_n| ρ^n - Σ_{i<n} |a_i| ρ^i` for `|L(z)|` at `|z| = ρ`.
pub fn tail_bound(abs: &[f64], rho: f64) -> f64 {
    let n = abs.len() - 1;
    abs[n] * rho.powi(n as i32) - (0..n).map(|i| abs[i] * rho.powi(i as i32)).sum::<f64>()
}

/// `σ = inf_{k ≥ 1, ℓ ≥ 0} |L(k + m + (ℓ - kr) iη)|`.
///
/// A box `k ≤ k_cap, ℓ ≤ l_cap` gives a first candidate `μ`; then a radius
/// `R` with tail bound `≥ μ` is found (the tail bound increases beyond
/// `max(1, Σ i|a_i| / (n|a_n|))`), and every lattice point with `|z| ≤ R`
/// is evaluated. The result is the exact minimum over the lattice.
pub fn compute_sigma(
    lcoeffs: &[Complex64],
    m: u32,
    r: i64,
    eta: f64,
    k_cap: u32,
    l_cap: i64,
) -> Result<Sigma> {
    let n = lcoeffs
        .iter()
        .rposition(|c| c.norm() > 0.0)
        .ok_or_else(|| Error::Degenerate("L is identically zero".into()))?;
    if eta == 0.0 || !eta.is_finite() {
        return Err(Error::Config("eta must be finite and nonzero".into()));
    }
    let coeffs = &lcoeffs[..=n];
    let point = |k: u32, l: i64| Complex64::new((k + m) as f64, (l - k as i64 * r) as f64 * eta);
    let mut best = (f64::INFINITY, (1u32, 0i64));
    let mut evaluated = 0usize;
    let mut visit = |k: u32, l: i64, best: &mut (f64, (u32, i64))| -> Result<()> {
        let v = eval_poly_c64(coeffs, point(k, l)).norm();
        evaluated += 1;
        if v == 0.0 {
            return Err(Error::Lattice {
                k: k as i64,
                j: l - k as i64 * r,
            });
        }
        if v < best.0 {
            *best = (v, (k, l));
        }
        Ok(())
    };
    if n == 0 {
        return Ok(Sigma {
            sigma: coeffs[0].norm(),
            argmin: (1, 0),
            radius: 0.0,
            evaluated: 0,
        });
    }
    for k in 1..=k_cap.max(1) {
        for l in 0..=l_cap.max(0) {
            visit(k, l, &mut best)?;
        }
    }
    let abs: Vec<f64> = coeffs.iter().map(|c| c.norm()).collect();
    let rho0 = (0..n).map(|i| i as f64 * abs[i]).sum::<f64>() / (n as f64 * abs[n]);
    let mut lo = rho0.max(1.0);
    let mut radius = lo;
    if tail_bound(&abs, radius) < best.0 {
        while tail_bound(&abs, radius) < best.0 {
            lo = radius;
            radius *= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + radius);
            if tail_bound(&abs, mid) >= best.0 {
                radius = mid;
            } else {
                lo = mid;
            }
        }
    }
    let kmax = (radius - m as f64).floor();
    if kmax >= 1.0 {
        let span = radius / eta.abs();
        for k in 1..=kmax as u32 {
            let re = (k + m) as f64;
            if re > radius {
                break;
            }
            let im_max = (radius * radius - re * re).max(0.0).sqrt() / eta.abs();
            let center = k as i64 * r;
            let lo_l = (center as f64 - im_max.min(span)).floor() as i64;
            let hi_l = (center as f64 + im_max.min(span)).ceil() as i64;
            for l in lo_l.max(0)..=hi_l.max(0) {
                if k <= k_cap && l <= l_cap {
                    continue;
                }
                visit(k, l, &mut best)?;
            }
        }
    }
    Ok(Sigma {
        sigma: best.0,
        argmin: best.1,
        radius,
        evaluated,
    })
}

/// Nonnegative Laurent data `Σ_ℓ C_ℓ t^{ℓ - start_offset}` indexed by `ℓ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RealLaurent {
    /// Exponent of `coeffs[0]`.
    pub start: i64,
    pub coeffs: Vec<f64>,
}

impl RealLaurent {
    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(l, c)| *c * t.powi((self.start + l as i64) as i32))
            .sum()
    }
}

/// One coefficient `|α_{s,p,Q}|` of `M̃`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MTerm {
    pub s: i64,
    pub p: u32,
    pub q: Vec<u32>,
    pub coeff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MajorantParams {
    /// Radius `ε` of the `t`-disc.
    pub eps_t: f64,
    pub tau: f64,
    pub tau_prime: f64,
    pub rho: f64,
    pub eps_n: f64,
}

impl Default for MajorantParams {
    fn default() -> Self {
        MajorantParams {
            eps_t: 0.9,
            tau: 0.3,
            tau_prime: 0.45,
            rho: 0.5,
            eps_n: 0.5,
        }
    }
}

impl MajorantParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tau > 0.0
            && self.tau < self.tau_prime
            && self.tau_prime <= self.eps_t
            && self.rho > 0.0
            && self.eps_n > 0.0;
        if !ok {
            return Err(Error::Config(format!(
                "need 0 < tau < tau' <= eps and rho, eps_n > 0, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MajorantEquation {
    pub sigma: f64,
    pub r: i64,
    /// `g_s = Σ_i |h_{s,i}|`.
    pub g: Vec<f64>,
    pub g_known: Trunc,
    pub m_tilde: Vec<MTerm>,
    /// Highest `t`- and `x`-powers of `M` that are known.
    pub m_known_s: Trunc,
    pub m_known_p: Trunc,
    pub params: MajorantParams,
}

pub fn build_majorant(eq: &ReducedEquation, sigma: f64, params: MajorantParams) -> Result<MajorantEquation> {
    if !(sigma > 0.0) {
        return Err(Error::Degenerate(format!("sigma must be positive, got {sigma}")));
    }
    params.validate()?;
    let split = split_lhs(eq);
    let g = split
        .h
        .iter()
        .map(|row| row.iter().map(ComplexScalar::abs_f64).sum())
        .collect();
    let mut m_tilde = Vec::new();
    let mut m_known_s = Trunc::Exact;
    let mut m_known_p = Trunc::Exact;
    for (q, c) in eq.m_series.terms() {
        m_known_p = m_known_p.min(c.trunc_k());
        for (&p, grade) in c.grades() {
            m_known_s = m_known_s.min(grade.trunc());
            for (s, a) in grade.terms() {
                if a.is_zero() {
                    continue;
                }
                if s < 0 {
                    return Err(Error::Internal(format!("M has a pole t^{s}")));
                }
                m_tilde.push(MTerm {
                    s,
                    p,
                    q: q.clone(),
                    coeff: a.abs_f64(),
                });
            }
        }
    }
    Ok(MajorantEquation {
        sigma,
        r: eq.r,
        g,
        g_known: split.known_s,
        m_tilde,
        m_known_s,
        m_known_p,
        params,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MajorantSolution {
    pub r: i64,
    pub trunc_k: u32,
    pub trunc_l: i64,
    /// `C_k` for `k = 1..=trunc_k`, indexed by `ℓ = 0..=trunc_l` with exponent
    /// `ℓ - k r`.
    pub grades: Vec<RealLaurent>,
}

impl MajorantSolution {
    /// `C_{kℓ}`.
    pub fn entry(&self, k: u32, l: i64) -> f64 {
        self.grades
            .get(k as usize - 1)
            .and_then(|g| g.coeffs.get(l as usize))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn entry_mut(&mut self, k: u32, l: i64) -> Option<&mut f64> {
        self.grades.get_mut(k as usize - 1)?.coeffs.get_mut(l as usize)
    }

    /// `Σ_{k ≤ K} C_k(t0) x^k`.
    pub fn partial_sum(&self, t0: Complex64, x: Complex64, k_max: u32) -> Complex64 {
        self.grades
            .iter()
            .take(k_max as usize)
            .enumerate()
            .map(|(k, g)| g.eval(t0) * x.powi(k as i32 + 1))
            .sum()
    }
}

fn conv(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Solves the majorant recursion
/// `σ C_{k,ℓ} = Σ_s g_s C_{k,ℓ-1-s} + R̃_{k,ℓ}` with
/// `R̃_k = [x^{k-1}] M̃(t, x, Σ C_k x^k)`, all indices in `ℓ = j + k r`.
pub fn solve_majorant(me: &MajorantEquation, k_max: u32, l_max: i64) -> Result<MajorantSolution> {
    if k_max < 1 || l_max < 0 {
        return Err(Error::Config("K must be at least 1 and L nonnegative".into()));
    }
    if !me.m_known_p.covers(k_max as i64 - 1) || !me.m_known_s.covers(l_max) {
        return Err(Error::Truncation(format!(
            "M is known through x^{}, t^{}; the majorant needs x^{}, t^{l_max}",
            me.m_known_p,
            me.m_known_s,
            k_max - 1
        )));
    }
    if l_max >= 1 && !me.g_known.covers(l_max - 1) {
        return Err(Error::Truncation(format!(
            "the t-expansion of A_i is known through h_{{s}} with s <= {}, need {}",
            me.g_known,
            l_max - 1
        )));
    }
    let len = l_max as usize + 1;
    let r = me.r;
    // collapse M̃ by (s, p, |Q|)
    let mut collapsed: BTreeMap<(u32, i64, u32), f64> = BTreeMap::new();
    for t in &me.m_tilde {
        *collapsed.entry((t.p, t.s, total_degree(&t.q))).or_insert(0.0) += t.coeff;
    }
    let mut c: Vec<Vec<f64>> = Vec::new();
    // powers[(d, g)]: grade g of V^d, indexed by ℓ with exponent ℓ - g r
    let mut powers: HashMap<(u32, u32), Vec<f64>> = HashMap::new();
    for k in 1..=k_max {
        let mut rhs = vec![0.0; len];
        for (&(p, s, d), &a) in &collapsed {
            if p > k - 1 {
                continue;
            }
            let g = k - 1 - p;
            let vp = power_grade(&mut powers, &c, d, g, len);
            // exponent of R̃ at ℓ is ℓ - (k-1) r; shift by s and p r
            let shift = s + p as i64 * r;
            for l in 0..len {
                let lv = l as i64 - shift;
                if lv >= 0 {
                    rhs[l] += a * vp[lv as usize];
                }
            }
        }
        let mut ck = vec![0.0; len];
        for l in 0..len {
            let mut acc = rhs[l];
            for (s, gs) in me.g.iter().enumerate() {
                let idx = l as i64 - 1 - s as i64;
                if idx < 0 {
                    break;
                }
                acc += gs * ck[idx as usize];
            }
            let v = acc / me.sigma;
            if v < 0.0 || !v.is_finite() {
                return Err(Error::Internal(format!("majorant coefficient C[{k},{l}] = {v}")));
            }
            ck[l] = v;
        }
        c.push(ck);
    }
    Ok(MajorantSolution {
        r,
        trunc_k: k_max,
        trunc_l: l_max,
        grades: c
            .into_iter()
            .enumerate()
            .map(|(k, coeffs)| RealLaurent {
                start: -((k as i64 + 1) * r),
                coeffs,
            })
            .collect(),
    })
}

fn power_grade(
    cache: &mut HashMap<(u32, u32), Vec<f64>>,
    c: &[Vec<f64>],
    d: u32,
    g: u32,
    len: usize,
) -> Vec<f64> {
    if d == 0 {
        let mut v = vec![0.0; len];
        if g == 0 {
            v[0] = 1.0;
        }
        return v;
    }
    if g < d {
        return vec![0.0; len];
    }
    if let Some(v) = cache.get(&(d, g)) {
        return v.clone();
    }
    let mut acc = vec![0.0; len];
    for g1 in 1..=g - (d - 1) {
        let Some(cg) = c.get(g1 as usize - 1) else {
            continue;
        };
        let rest = power_grade(cache, c, d - 1, g - g1, len);
        for (o, v) in acc.iter_mut().zip(conv(cg, &rest, len)) {
            *o += v;
        }
    }
    cache.insert((d, g), acc.clone());
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DominanceReport {
    pub ok: bool,
    /// `min (C_{kℓ} - |c_{kℓ}|)` over the checked entries.
    pub worst_margin: f64,
    pub worst_entry: Option<(u32, i64)>,
    pub first_violation: Option<(u32, i64)>,
    pub checked: usize,
    pub violations: usize,
}

/// Entrywise `|c_{kℓ}| ≤ C_{kℓ} + slack`, `c_{kℓ}` the coefficient of
/// `t^{ℓ - k r}` in grade `k` of `ψ`.
pub fn check_dominance(psi: &ExoticSeries, cs: &MajorantSolution) -> Result<DominanceReport> {
    let (k_max, l_max, r) = (cs.trunc_k, cs.trunc_l, cs.r);
    if !psi.trunc_k().covers(k_max as i64) {
        return Err(Error::Shape(format!(
            "psi is known through x^{} but the majorant has {k_max} grades",
            psi.trunc_k()
        )));
    }
    let mut report = DominanceReport {
        ok: true,
        worst_margin: f64::INFINITY,
        worst_entry: None,
        first_violation: None,
        checked: 0,
        violations: 0,
    };
    for k in 1..=k_max {
        let grade = psi.grade_or_zero(k).expect("grade within truncation");
        let top = l_max - k as i64 * r;
        if !grade.trunc().covers(top) {
            return Err(Error::Shape(format!(
                "grade {k} of psi is known through t^{} but the check needs t^{top}",
                grade.trunc()
            )));
        }
        if let Some(o) = grade.ord() {
            if o < -(k as i64) * r {
                return Err(Error::Shape(format!(
                    "grade {k} of psi has pole order {} beyond the slot {}",
                    -o,
                    k as i64 * r
                )));
            }
        }
        for l in 0..=l_max {
            let c = grade.coeff(l - k as i64 * r).abs_f64();
            let big = cs.entry(k, l);
            let margin = big - c;
            report.checked += 1;
            if margin < report.worst_margin {
                report.worst_margin = margin;
                report.worst_entry = Some((k, l));
            }
            if c > big + DOMINANCE_SLACK {
                report.violations += 1;
                report.ok = false;
                report.first_violation.get_or_insert((k, l));
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MBound {
    pub value: f64,
    /// The retained coefficients near the truncation carry more than 1% of
    /// the bound, so the truncated sum may not reflect the true series.
    pub tail_warning: bool,
    pub tail_fraction: f64,
}

fn m_bound_with(me: &MajorantEquation, t_hi: f64, t_lo: f64) -> MBound {
    let p = &me.params;
    let frontier_s = me.m_known_s.finite().map(|t| 0.9 * t as f64);
    let frontier_p = me.m_known_p.finite().map(|t| 0.9 * t as f64);
    let mut total = 0.0;
    let mut tail = 0.0;
    for t in &me.m_tilde {
        let v = t.coeff * t_hi.powi(t.s as i32) * p.rho.powi(t.p as i32 + 1) * p.eps_n.powi(total_degree(&t.q) as i32)
            / (me.sigma * t_lo.powi(me.r as i32));
        total += v;
        let near_s = frontier_s.is_some_and(|f| t.s as f64 > f);
        let near_p = frontier_p.is_some_and(|f| t.p as f64 > f);
        if near_s || near_p {
            tail += v;
        }
    }
    let gfront = me.g_known.finite().map(|t| 0.9 * t as f64);
    for (s, gs) in me.g.iter().enumerate() {
        let v = t_hi / me.sigma * gs * t_hi.powi(s as i32) * p.eps_n;
        total += v;
        if gfront.is_some_and(|f| s as f64 > f) {
            tail += v;
        }
    }
    let tail_fraction = if total > 0.0 { tail / total } else { 0.0 };
    MBound {
        value: total,
        tail_warning: tail_fraction > 0.01,
        tail_fraction,
    }
}

/// Upper bound on `|(t/σ) H̃ + x M̃/(σ t^r)|` over the band
/// `τ < |t| < τ'`, `|x| < ρ`, `|v| < ε_n`, by coefficient-norm summation.
pub fn estimate_m_bound(me: &MajorantEquation, tau: f64, tau_prime: f64) -> Result<MBound> {
    if !(tau > 0.0 && tau < tau_prime && tau_prime <= me.params.eps_t) {
        return Err(Error::Config(format!(
            "need 0 < tau < tau' <= eps, got tau = {tau}, tau' = {tau_prime}"
        )));
    }
    Ok(m_bound_with(me, tau_prime, tau))
}

/// The same bound on the circle `|t| = |t0|`.
pub fn m_bound_at(me: &MajorantEquation, t0: Complex64) -> MBound {
    m_bound_with(me, t0.norm(), t0.norm())
}

/// `ρ (ε_n / (ε_n + 2𝓜))²`.
pub fn certified_radius(params: &MajorantParams, m_bound: f64) -> f64 {
    let q = params.eps_n / (params.eps_n + 2.0 * m_bound);
    params.rho * q * q
}

/// `a(t0) = (t0/σ) Σ g_s t0^s`.
pub fn nondegeneracy(me: &MajorantEquation, t0: Complex64) -> Complex64 {
    let h: Complex64 = me
        .g
        .iter()
        .enumerate()
        .map(|(s, g)| *g * t0.powi(s as i32))
        .sum();
    t0 / me.sigma * h
}

pub fn eval_m_tilde(me: &MajorantEquation, t0: Complex64, x: Complex64, v: Complex64) -> Complex64 {
    me.m_tilde
        .iter()
        .map(|t| t.coeff * t0.powi(t.s as i32) * x.powi(t.p as i32) * v.powi(total_degree(&t.q) as i32))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FixedPoint {
    pub v: [f64; 2],
    pub iterations: u32,
}

impl FixedPoint {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.v[0], self.v[1])
    }
}

/// Picard iteration from `v = 0` for
/// `v = x M̃(t0, x, v) / (σ t0^r (1 - a(t0)))`, the fixed-point equation
/// with the part linear in `v` through `H̃` moved to the left.
pub fn fixed_point_solve(me: &MajorantEquation, t0: Complex64, x: Complex64, max_iter: u32) -> Result<FixedPoint> {
    let p = &me.params;
    let at = t0.norm();
    if !(at > p.tau && at < p.eps_t) {
        return Err(Error::OutsideDomain(format!(
            "|t0| = {at} is outside ({}, {})",
            p.tau, p.eps_t
        )));
    }
    let a = nondegeneracy(me, t0);
    let one_minus = Complex64::new(1.0, 0.0) - a;
    if one_minus.norm() <= NONDEGENERACY_MARGIN {
        return Err(Error::Degenerate(format!("(t0/sigma) sum g_s t0^s = {a} is 1 within the margin")));
    }
    let denom = me.sigma * t0.powi(me.r as i32) * one_minus;
    let mut v = Complex64::new(0.0, 0.0);
    for it in 1..=max_iter {
        let next = x * eval_m_tilde(me, t0, x, v) / denom;
        if !next.re.is_finite() || !next.im.is_finite() || next.norm() > p.eps_n {
            return Err(Error::OutsideDomain(format!(
                "iterate {it} has |v| = {} beyond eps_n = {}",
                next.norm(),
                p.eps_n
            )));
        }
        let diff = (next - v).norm();
        v = next;
        if diff <= PICARD_TOL * v.norm() || v.norm() == 0.0 {
            return Ok(FixedPoint {
                v: [v.re, v.im],
                iterations: it,
            });
        }
    }
    Err(Error::Numerical(format!("Picard iteration did not converge in {max_iter} steps")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentSeries;
    use crate::multiseries::MultiSeries;
    use crate::scalar::Backend;

    const E: Backend = Backend::Exact;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn simple_eq(a: Vec<LaurentSeries>, m_series: MultiSeries, r: i64) -> ReducedEquation {
        let lcoeffs = a.iter().map(|s| s.coeff(0)).collect();
        ReducedEquation {
            eta: E.int(1),
            m: 1,
            r,
            n_x: 0,
            e: 0,
            a,
            lcoeffs,
            m_series,
        }
    }

    #[test]
    fn sigma_examples() {
        let s = compute_sigma(&[c(0.0, 0.0), c(1.0, 0.0)], 1, 0, 1.0, 50, 50).unwrap();
        assert_eq!(s.sigma, 2.0);
        assert_eq!(s.argmin, (1, 0));
        let s = compute_sigma(&[c(-0.5, 0.0), c(1.0, 0.0)], 1, 0, 1.0, 50, 50).unwrap();
        assert_eq!(s.sigma, 1.5);
        let s = compute_sigma(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1, 0, 1.0, 50, 50).unwrap();
        assert_eq!(s.sigma, 4.0);
    }

    #[test]
    fn sigma_found_outside_the_box() {
        // root at 30 + 0.5 i: minimum near k = 29, far outside a 5x5 box
        let s = compute_sigma(&[c(-30.0, -0.5), c(1.0, 0.0)], 1, 0, 1.0, 5, 5).unwrap();
        assert!((s.sigma - 0.5).abs() < 1e-12);
        assert_eq!(s.argmin, (29, 0));
    }

    #[test]
    fn sigma_lattice_zero_is_an_error() {
        assert!(matches!(
            compute_sigma(&[c(-3.0, 0.0), c(1.0, 0.0)], 1, 0, 1.0, 10, 10),
            Err(Error::Lattice { k: 2, j: 0 })
        ));
    }

    #[test]
    fn split_examples() {
        let eta = E.int(1);
        let zero_m = MultiSeries::zero(&eta, 2, 4);
        let eq = simple_eq(vec![LaurentSeries::one(E), LaurentSeries::one(E)], zero_m.clone(), 0);
        assert!(split_lhs(&eq).h.is_empty());
        let a1 = LaurentSeries::from_coeffs(E, 0, vec![E.int(1), E.int(1)], crate::laurent::Trunc::Exact).unwrap();
        let eq = simple_eq(vec![LaurentSeries::zero(E, crate::laurent::Trunc::Exact), a1], zero_m, 0);
        let sp = split_lhs(&eq);
        assert_eq!(sp.h.len(), 1);
        assert_eq!(sp.h[0][1], E.int(-1));
        assert!(sp.h[0][0].is_zero());
        let me = build_majorant(&eq, 1.0, MajorantParams::default()).unwrap();
        assert_eq!(me.g, vec![1.0]);
    }

    #[test]
    fn one_step_and_geometric_majorants() {
        let params = MajorantParams::default();
        let me = MajorantEquation {
            sigma: 2.0,
            r: 0,
            g: vec![],
            g_known: Trunc::Exact,
            m_tilde: vec![MTerm { s: 0, p: 0, q: vec![0, 0], coeff: 1.0 }],
            m_known_s: Trunc::Exact,
            m_known_p: Trunc::Exact,
            params: params.clone(),
        };
        let sol = solve_majorant(&me, 4, 6).unwrap();
        assert_eq!(sol.entry(1, 0), 0.5);
        assert!((1..=6).all(|l| sol.entry(1, l) == 0.0));
        assert!((2..=4).all(|k| (0..=6).all(|l| sol.entry(k, l) == 0.0)));
        // g_0 = sigma/2: C_1(t) = (1/sigma) Σ (t/2)^l
        let me = MajorantEquation { g: vec![1.0], ..me };
        let sol = solve_majorant(&me, 1, 10).unwrap();
        for l in 0..=10 {
            assert!((sol.entry(1, l) - 0.5 * 0.5f64.powi(l as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn m_bound_examples() {
        let params = MajorantParams {
            rho: 0.1,
            ..MajorantParams::default()
        };
        let me = MajorantEquation {
            sigma: 1.0,
            r: 1,
            g: vec![],
            g_known: Trunc::Exact,
            m_tilde: vec![],
            m_known_s: Trunc::Exact,
            m_known_p: Trunc::Exact,
            params,
        };
        assert_eq!(estimate_m_bound(&me, 0.5, 0.6).unwrap().value, 0.0);
        let me = MajorantEquation {
            m_tilde: vec![MTerm { s: 0, p: 0, q: vec![0], coeff: 1.0 }],
            ..me
        };
        let b = estimate_m_bound(&me, 0.5, 0.6).unwrap();
        assert!((b.value - 0.2).abs() < 1e-15);
        assert!(!b.tail_warning);
        assert!(estimate_m_bound(&me, 0.6, 0.5).is_err());
    }

    #[test]
    fn fixed_point_examples() {
        let me = MajorantEquation {
            sigma: 2.0,
            r: 1,
            g: vec![],
            g_known: Trunc::Exact,
            m_tilde: vec![MTerm { s: 0, p: 0, q: vec![0], coeff: 1.0 }],
            m_known_s: Trunc::Exact,
            m_known_p: Trunc::Exact,
            params: MajorantParams::default(),
        };
        let t0 = c(0.4, 0.0);
        let z = fixed_point_solve(&me, t0, c(0.0, 0.0), 10).unwrap();
        assert_eq!(z.value(), c(0.0, 0.0));
        let x = c(0.01, 0.02);
        let v = fixed_point_solve(&me, t0, x, 10).unwrap();
        assert!((v.value() - x / (2.0 * t0)).norm() < 1e-15);
        assert!(v.iterations <= 2);
        assert!(matches!(fixed_point_solve(&me, c(0.1, 0.0), x, 10), Err(Error::OutsideDomain(_))));
        let degenerate = MajorantEquation { g: vec![2.0 / 0.5], ..me };
        assert!(matches!(
            fixed_point_solve(&degenerate, c(0.5, 0.0), x, 10),
            Err(Error::Degenerate(_))
        ));
    }
}
