//! Roots of the indicial polynomial `L(z) = Σ A_i(0) z^i` and its zeros on
//! the lattice `n + iηj`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{Complex64, ComplexScalar};

pub fn eval_poly_c64(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Horner evaluation in the coefficients' backend.
pub fn eval_poly(coeffs: &[ComplexScalar], z: &ComplexScalar) -> ComplexScalar {
    let mut acc = z.backend().zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * z) + c;
    }
    acc
}

/// Index of the highest nonzero coefficient.
pub fn degree(coeffs: &[Complex64]) -> Option<usize> {
    coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0))
}

/// All complex roots with multiplicity: eigenvalues of the companion matrix,
/// each polished by Newton steps.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = degree(coeffs).ok_or_else(|| Error::Numerical("the zero polynomial has no isolated roots".into()))?;
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Numerical("non-finite polynomial coefficient".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    if n == 1 {
        return Ok(vec![-coeffs[0] / lead]);
    }
    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -coeffs[i] / lead;
    }
    let eig = comp
        .try_schur(1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("companion-matrix eigenvalue iteration did not converge".into()))?
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("companion matrix has no complex Schur form".into()))?;
    let deriv: Vec<Complex64> = (1..=n).map(|i| coeffs[i] * i as f64).collect();
    let roots = eig
        .iter()
        .map(|&z0| {
            let mut best = z0;
            let mut best_val = eval_poly_c64(coeffs, z0).norm();
            let mut z = z0;
            for _ in 0..50 {
                let d = eval_poly_c64(&deriv, z);
                if d.norm() == 0.0 {
                    break;
                }
                z -= eval_poly_c64(coeffs, z) / d;
                let v = eval_poly_c64(coeffs, z).norm();
                if !v.is_finite() {
                    break;
                }
                if v < best_val {
                    best = z;
                    best_val = v;
                }
                if v == 0.0 {
                    break;
                }
            }
            best
        })
        .collect::<Vec<_>>();
    if roots.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("root finding produced non-finite values".into()));
    }
    Ok(roots)
}

/// A zero of `L` at `z = n + iηj`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeHit {
    pub n: i64,
    pub j: i64,
}

/// Lattice points `n + iηj` with `n ≥ 1` where `L` vanishes.
///
/// Candidates come from the floating roots; each is confirmed by evaluating
/// `L` in its own backend at the 3×3 block of lattice points around the
/// root (exactly in exact mode, to a precision-scaled tolerance in float
/// mode).
pub fn lattice_zeros(lcoeffs: &[ComplexScalar], eta: &ComplexScalar) -> Result<Vec<LatticeHit>> {
    let c64: Vec<Complex64> = lcoeffs.iter().map(ComplexScalar::to_c64).collect();
    let roots = poly_roots(&c64)?;
    let eta_f = eta.to_c64().re;
    let backend = eta.backend();
    let i_eta = eta.mul_i();
    let tol = backend.zero_tol().sqrt();
    let mut hits = Vec::new();
    for z in roots {
        let n0 = z.re.round() as i64;
        let j0 = (z.im / eta_f).round() as i64;
        for n in n0 - 1..=n0 + 1 {
            if n < 1 {
                continue;
            }
            for j in j0 - 1..=j0 + 1 {
                let zl = &backend.int(n) + &i_eta.mul_int(j);
                let val = eval_poly(lcoeffs, &zl);
                let zero = if backend.is_exact() {
                    val.is_zero()
                } else {
                    let scale: f64 = c64
                        .iter()
                        .enumerate()
                        .map(|(i, c)| c.norm() * zl.abs_f64().powi(i as i32))
                        .sum();
                    val.abs_f64() <= tol * scale.max(1.0)
                };
                if zero {
                    hits.push(LatticeHit { n, j });
                }
            }
        }
    }
    hits.sort();
    hits.dedup();
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Backend;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic_roots() {
        // (z - 2)(z - (1 + i)) = z^2 - (3 + i) z + (2 + 2i)
        let mut r = poly_roots(&[c(2.0, 2.0), c(-3.0, -1.0), c(1.0, 0.0)]).unwrap();
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((r[0] - c(1.0, 1.0)).norm() < 1e-12);
        assert!((r[1] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn double_root() {
        // (z - i)^2 = z^2 - 2i z - 1
        let r = poly_roots(&[c(-1.0, 0.0), c(0.0, -2.0), c(1.0, 0.0)]).unwrap();
        for z in r {
            assert!((z - c(0.0, 1.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn lattice_zero_detection() {
        let e = Backend::Exact;
        // L(z) = z - (2 + 3i), eta = 1: zero at n = 2, j = 3
        let l = vec![e.parse_pair("-2", "-3").unwrap(), e.int(1)];
        assert_eq!(lattice_zeros(&l, &e.int(1)).unwrap(), vec![LatticeHit { n: 2, j: 3 }]);
        // eta = 2: 3i is not on the lattice i*2*j
        assert!(lattice_zeros(&l, &e.int(2)).unwrap().is_empty());
        // negative real root never hits n >= 1
        let l = vec![e.int(1), e.int(1)];
        assert!(lattice_zeros(&l, &e.int(1)).unwrap().is_empty());
        let f = Backend::Float { bits: 128 };
        let l = vec![f.int(-5), f.int(1)];
        assert_eq!(lattice_zeros(&l, &f.int(1)).unwrap(), vec![LatticeHit { n: 5, j: 0 }]);
    }
}
