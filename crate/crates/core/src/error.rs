use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Incompatible backends, mismatched eta, or an invalid configuration value.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("singular series: {0}")]
    Singular(String),

    #[error("syntax error at line {line}, column {column} (offset {offset}): {message}")]
    Syntax {
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("delta(y, {index}) exceeds the declared order {order}")]
    OrderExceeded { index: usize, order: usize },

    #[error("file format error: {0}")]
    Format(String),

    #[error("truncation insufficient: {0}")]
    Truncation(String),

    #[error("not a solution: residual grade x^{grade} is nonzero")]
    NotASolution { grade: u32 },

    #[error("hypotheses not satisfied: {0}")]
    Hypothesis(String),

    #[error("reduction failed: {0}")]
    Reduction(String),

    #[error("lattice violation: L(k+m+i*eta*j) = 0 at k={k}, j={j}")]
    Lattice { k: i64, j: i64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error("outside domain: {0}")]
    OutsideDomain(String),

    #[error("degenerate parameter: {0}")]
    Degenerate(String),

    #[error("empty sector: the band needs arg x in ({lo:.6}, {hi:.6}), which leaves (0, 2pi)")]
    EmptySector { lo: f64, hi: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("dominance violated at k={k}, l={l}")]
    Dominance { k: u32, l: i64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Error {
        match self {
            Error::Stage { .. } => self,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    /// Process exit code for the command-line driver.
    ///
    /// 0 success, 1 usage/parse, 2 hypothesis failure, 3 lattice/sigma failure,
    /// 4 dominance failure, 5 numeric indeterminacy.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Syntax { .. }
            | Error::OrderExceeded { .. }
            | Error::Format(_)
            | Error::Shape(_)
            | Error::Io(_)
            | Error::Json(_) => 1,
            Error::NotASolution { .. } | Error::Hypothesis(_) | Error::Reduction(_) => 2,
            Error::Lattice { .. } => 3,
            Error::Dominance { .. } => 4,
            Error::Stage { source, .. } => source.exit_code(),
            Error::Singular(_)
            | Error::Truncation(_)
            | Error::Numerical(_)
            | Error::Indeterminate(_)
            | Error::OutsideDomain(_)
            | Error::Degenerate(_)
            | Error::EmptySector { .. }
            | Error::Internal(_) => 5,
        }
    }
}
