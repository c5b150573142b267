//! Example problems shipped with the crate.

use crate::error::Result;
use crate::exotic::{ExoticRecord, ExoticSeries};
use crate::fexpr::{parse_ode_file, OdeExpression};
use crate::scalar::Backend;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusProblem {
    pub name: &'static str,
    pub description: &'static str,
    pub ode: &'static str,
    pub series: &'static str,
}

/// `δy = iy` with `φ = t`.
pub const LINEAR: CorpusProblem = CorpusProblem {
    name: "linear",
    description: "delta y = i y with phi = x^i",
    ode: include_str!("../corpus/linear.ode"),
    series: include_str!("../corpus/linear.series.json"),
};

/// `δy = (1-i)(y² - y)` with `φ = t/(t - x) = Σ t^{-k} x^k`.
pub const RICCATI: CorpusProblem = CorpusProblem {
    name: "riccati",
    description: "delta y = (1-i)(y^2 - y) with phi = t/(t - x)",
    ode: include_str!("../corpus/riccati.ode"),
    series: include_str!("../corpus/riccati.series.json"),
};

/// A second-order equation solved by the Riccati series whose partial
/// derivatives break the order hypotheses.
pub const VIOLATING: CorpusProblem = CorpusProblem {
    name: "riccati_violating",
    description: "second-order variant of the Riccati problem violating the order hypotheses",
    ode: include_str!("../corpus/riccati_violating.ode"),
    series: include_str!("../corpus/riccati.series.json"),
};

/// Painlevé III in `δ`-form with the exotic leading term `y = x^i + …`.
pub const PAINLEVE3: CorpusProblem = CorpusProblem {
    name: "painleve3",
    description: "Painleve III in delta form with leading term x^i, twelve grades",
    ode: include_str!("../corpus/painleve3.ode"),
    series: include_str!("../corpus/painleve3.series.json"),
};

pub const ALL: [CorpusProblem; 4] = [LINEAR, RICCATI, VIOLATING, PAINLEVE3];

impl CorpusProblem {
    pub fn by_name(name: &str) -> Option<CorpusProblem> {
        ALL.into_iter().find(|p| p.name == name)
    }

    pub fn equation(&self) -> Result<OdeExpression> {
        parse_ode_file(self.ode)
    }

    pub fn solution(&self, backend: Backend) -> Result<ExoticSeries> {
        let rec: ExoticRecord = serde_json::from_str(self.series)?;
        ExoticSeries::from_record(&rec, backend)
    }

    pub fn load(&self, backend: Backend) -> Result<(OdeExpression, ExoticSeries)> {
        Ok((self.equation()?, self.solution(backend)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_loads() {
        for p in ALL {
            let (f, phi) = p.load(Backend::Exact).unwrap();
            assert_eq!(f.eta.as_ref().map(|e| e.to_string()).as_deref(), Some("1"));
            assert!(!phi.is_zero(), "{}", p.name);
            p.load(Backend::float(96).unwrap()).unwrap();
        }
        assert_eq!(CorpusProblem::by_name("riccati"), Some(RICCATI));
    }
}
