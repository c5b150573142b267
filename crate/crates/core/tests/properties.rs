use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use exoseries::corpus;
use exoseries::exotic::ExoticSeries;
use exoseries::laurent::{LaurentSeries, Trunc};
use exoseries::majorant::{
    build_majorant, fixed_point_solve, solve_majorant, split_lhs, MajorantParams,
};
use exoseries::multiseries::MultiSeries;
use exoseries::pipeline::{compare_tail, reduce_stage, run_pipeline, sigma_stage, PipelineConfig};
use exoseries::reduction::{check_hypotheses, ReducedEquation};
use exoseries::scalar::{Backend, Complex64};
use exoseries::sector::{eval_partial_sum, t_of_x};
use exoseries::fuchsolve::solve_coefficients;

const E: Backend = Backend::Exact;

fn rand_int(rng: &mut ChaCha8Rng) -> String {
    rng.gen_range(-5..=5).to_string()
}

fn reduced(p: corpus::CorpusProblem, backend: Backend) -> (ExoticSeries, ReducedEquation) {
    let (f, phi) = p.load(backend).unwrap();
    let h = check_hypotheses(&f, &phi, 12, 24).unwrap();
    let (_, eq) = reduce_stage(&f, &phi, &h).unwrap();
    (phi, eq)
}

#[test]
fn split_reconstructs_the_operator() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let eta = E.int(1);
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let a: Vec<LaurentSeries> = (0..=n)
            .map(|i| {
                let mut coeffs: Vec<_> = (0..=3)
                    .map(|_| E.parse_pair(&rand_int(&mut rng), &rand_int(&mut rng)).unwrap())
                    .collect();
                if i == n && coeffs[0].is_zero() {
                    coeffs[0] = E.int(1);
                }
                LaurentSeries::from_coeffs(E, 0, coeffs, Trunc::Exact).unwrap()
            })
            .collect();
        let eq = ReducedEquation {
            eta: eta.clone(),
            m: 1,
            r: 0,
            n_x: 0,
            e: 0,
            lcoeffs: a.iter().map(|s| s.coeff(0)).collect(),
            a: a.clone(),
            m_series: MultiSeries::zero(&eta, n + 1, 2),
        };
        let split = split_lhs(&eq);
        for (i, ai) in a.iter().enumerate() {
            assert_eq!(ai.coeff(0), split.lcoeffs[i]);
            for s in 0..=4i64 {
                let h = split
                    .h
                    .get(s as usize)
                    .map_or(E.zero(), |row| row[i].clone());
                assert_eq!(ai.coeff(s + 1), -&h, "A_{i} at t^{}", s + 1);
            }
        }
    }
}

#[test]
fn majorant_matches_reduction_coefficients() {
    let (_, eq) = reduced(corpus::RICCATI, E);
    let me = build_majorant(&eq, 1.0, MajorantParams::default()).unwrap();
    let mut expected = Vec::new();
    for (q, c) in eq.m_series.terms() {
        for (&p, g) in c.grades() {
            for (s, a) in g.terms() {
                expected.push((s, p, q.clone(), a.abs_f64()));
            }
        }
    }
    let got: Vec<_> = me.m_tilde.iter().map(|t| (t.s, t.p, t.q.clone(), t.coeff)).collect();
    assert_eq!(got, expected);
    assert!(me.g.iter().all(|g| *g == 0.0));
}

#[test]
fn majorant_is_monotone_in_its_coefficients() {
    let (_, eq) = reduced(corpus::PAINLEVE3, E);
    let me = build_majorant(&eq, 4.0, MajorantParams::default()).unwrap();
    let base = solve_majorant(&me, 6, 12).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let mut bigger = me.clone();
        let i = rng.gen_range(0..bigger.m_tilde.len());
        bigger.m_tilde[i].coeff += rng.gen_range(0.01..1.0);
        let grown = solve_majorant(&bigger, 6, 12).unwrap();
        for k in 1..=6 {
            for l in 0..=12 {
                assert!(grown.entry(k, l) >= base.entry(k, l));
            }
        }
    }
}

#[test]
fn partial_sums_are_grade_linear() {
    let (_, phi) = corpus::PAINLEVE3.load(E).unwrap();
    let x = Complex64::from_polar(0.02, 1.3);
    let joint = eval_partial_sum(&phi, x, 8).unwrap();
    let t = t_of_x(x, 1.0).unwrap();
    let separate: Complex64 = (0..=8u32)
        .map(|k| phi.grade(k).map_or(Complex64::new(0.0, 0.0), |g| g.eval_c64(t) * x.powi(k as i32)))
        .sum();
    assert!((joint - separate).norm() <= 1e-15 * joint.norm());
}

#[test]
fn painleve_tail_matches_shipped_data() {
    let (phi, eq) = reduced(corpus::PAINLEVE3, E);
    let sol = solve_coefficients(&eq, 11, 24).unwrap();
    let cmp = compare_tail(&sol.psi, &phi, eq.m);
    assert_eq!(cmp.compared_grades, (1..=11).collect::<Vec<_>>());
    assert!(cmp.mismatched_grades.is_empty());
    assert!(sol.deviations.is_empty());
}

#[test]
fn fixed_point_series_gap_shrinks_with_k() {
    let (_, eq) = reduced(corpus::RICCATI, E);
    let cfg = PipelineConfig::default();
    let sigma = sigma_stage(&eq, &cfg).unwrap();
    let me = build_majorant(&eq, sigma.sigma, cfg.params.clone()).unwrap();
    let big = solve_majorant(&me, 12, 24).unwrap();
    let t0 = Complex64::from_polar(0.4, 0.3);
    let x = Complex64::new(2e-2, 0.0);
    let v = fixed_point_solve(&me, t0, x, 500).unwrap().value();
    let gaps: Vec<f64> = (1..=8).map(|k| (v - big.partial_sum(t0, x, k)).norm()).collect();
    for w in gaps.windows(2) {
        assert!(w[1] < w[0], "{gaps:?}");
    }
}

#[test]
fn float_and_exact_pipelines_agree() {
    let (f, phi) = corpus::PAINLEVE3.load(E).unwrap();
    let exact = run_pipeline(&f, &phi, &PipelineConfig::default());
    let float = run_pipeline(
        &f,
        &phi,
        &PipelineConfig {
            backend: Backend::float(128).unwrap(),
            ..PipelineConfig::default()
        },
    );
    assert!(exact.error.is_none(), "{:?}", exact.error);
    assert!(float.error.is_none(), "{:?}", float.error);
    let (a, b) = (exact.report.majorant.unwrap(), float.report.majorant.unwrap());
    assert_eq!(a.sigma, b.sigma);
    assert!((a.m_bound.value - b.m_bound.value).abs() <= 1e-12 * a.m_bound.value);
    assert!((a.radius - b.radius).abs() <= 1e-12 * a.radius);
}
