//! Exotic formal series solutions of nonlinear ODEs written with the Euler
//! operator `δ = x d/dx`.
//!
//! A series `φ = Σ α_k(t) x^k` with `t = x^{iη}` and Laurent coefficients
//! `α_k` is checked against an equation `F(x, y, δy, ..., δ^n y) = 0`,
//! reduced to the Fuchsian form `t^r Σ A_i(t)(δ+m)^i u = x M(x, t, u, ...)`,
//! solved grade by grade, and then bounded by a real majorant series whose
//! convergence gives a certified radius on a band `τ < |t| < τ'`.
//!
//! Modules follow that pipeline:
//!
//! * [`scalar`], [`laurent`], [`exotic`], [`multiseries`]: exact Gaussian
//!   rationals or arbitrary-precision floats, and the series built on them.
//! * [`fexpr`]: the equation language and its parser.
//! * [`reduction`] and [`roots`]: residual checks, hypotheses and the
//!   Fuchsian reduction.
//! * [`fuchsolve`]: the coefficient recursion.
//! * [`majorant`]: `σ`, the majorant series, dominance and the fixed point.
//! * [`sector`]: numerical evaluation on sectors and convergence diagnostics.
//! * [`pipeline`] and [`corpus`]: end-to-end runs and the shipped problems.
//!
//! ```
//! use exoseries::{corpus, pipeline::{run_pipeline, PipelineConfig}, scalar::Backend};
//!
//! let (f, phi) = corpus::RICCATI.load(Backend::Exact).unwrap();
//! let out = run_pipeline(&f, &phi, &PipelineConfig::default());
//! assert!(out.report.ok);
//! ```

pub mod error;
pub mod scalar;
pub mod laurent;
pub mod exotic;
pub mod multiseries;
pub mod fexpr;
pub mod roots;
pub mod reduction;
pub mod fuchsolve;
pub mod majorant;
pub mod sector;
pub mod corpus;
pub mod pipeline;
