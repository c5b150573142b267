//! Runs the whole chain on every shipped problem and prints a summary line
//! per stage. Pass `--json` to print the full reports.

use exoseries::corpus;
use exoseries::pipeline::{run_pipeline, to_json, PipelineConfig};

fn main() -> Result<(), exoseries::error::Error> {
    let json = std::env::args().any(|a| a == "--json");
    let cfg = PipelineConfig::default();
    for problem in corpus::ALL {
        let (f, phi) = problem.load(cfg.backend)?;
        let out = run_pipeline(&f, &phi, &cfg);
        let r = &out.report;
        println!("== {} ({})", problem.name, problem.description);
        if let Some(v) = &r.verify {
            println!(
                "verify:   solution to order {}, N = {:?}, ord B = {:?}, violations {:?}",
                v.is_solution_to_order, v.hypothesis.n, v.hypothesis.ord_b, v.hypothesis.violations
            );
        }
        if let Some(red) = &r.reduced {
            println!("reduce:   m = {}, r = {}, e = {}, {} terms in M", red.m, red.r, red.e, red.m_terms);
        }
        if let Some(s) = &r.solve {
            println!(
                "solve:    tail compared on grades {:?}, mismatches {:?}",
                s.tail.compared_grades, s.tail.mismatched_grades
            );
        }
        if let Some(s) = &r.sigma {
            println!("sigma:    {} at (k, l) = {:?}", s.sigma, s.argmin);
        }
        if let Some(m) = &r.majorant {
            println!(
                "majorant: M bound {:.6e}, radius {:.6e}, dominance ok {} (worst margin {:.3e})",
                m.m_bound.value, m.radius, m.dominance.ok, m.dominance.worst_margin
            );
        }
        if let Some(fp) = &r.fixed_point {
            let worst = fp.iter().filter_map(|c| c.relative_error).fold(0.0, f64::max);
            println!("fixed pt: {} points, worst relative error {worst:.3e}", fp.len());
        }
        if let Some(s) = &r.sector {
            println!(
                "sector:   arg in ({:.4}, {:.4}), {} convergent / {} divergent / {} inconclusive, max q {:.3e}",
                s.theta_min, s.theta_max, s.convergent, s.divergent, s.inconclusive, s.max_q
            );
        }
        match &out.error {
            None => println!("result:   ok"),
            Some(e) => println!("result:   halted (exit code {}): {e}", e.exit_code()),
        }
        if json {
            println!("{}", to_json(r)?);
        }
    }
    Ok(())
}
