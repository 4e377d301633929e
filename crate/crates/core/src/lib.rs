//! Best non-decreasing approximation of sampled functions under Orlicz
//! modular and Luxemburg norm objectives, with machine-checkable optimality
//! certificates.
//!
//! Everything lives on a cell grid over [a, b] with piecewise-constant
//! functions, so each integral the theory needs — the modular, the score
//! profile, directional derivatives — is a finite exact sum. The solver is
//! pool-adjacent-violators with a bisection block solver that works for any
//! admissible generator Φ; the `certificate` module verifies its output
//! against the optimality characterization, and the `reference` module
//! provides deliberately simple brute-force oracles for testing.
//!
//! ```
//! use orlicz_isotone::{
//!     certificate::{certify, CertifyOptions},
//!     grid::{CellGrid, StepFunction},
//!     isotone::{fit_isotone, SolverOptions},
//!     orlicz::OrliczSpec,
//! };
//!
//! let spec = OrliczSpec::log_shifted();
//! let grid = CellGrid::uniform(0.0, 1.0, 4).unwrap();
//! let f = StepFunction::new(vec![2.0, 1.0, 3.0, 2.5]);
//! let fit = fit_isotone(&spec, &grid, &f, &SolverOptions::default()).unwrap();
//! assert!(fit.g_star.as_step().is_non_decreasing());
//! let report = certify(&spec, &grid, &f, &fit, &CertifyOptions::default()).unwrap();
//! assert!(report.passed);
//! ```

pub mod certificate;
pub mod error;
pub mod fixtures;
pub mod grid;
pub mod isotone;
pub mod luxemburg;
pub mod orlicz;
pub mod problem;
pub mod reference;
pub mod study;

pub use error::{Error, Result};
pub use grid::{CellGrid, MonotoneStepFunction, StepFunction};
pub use isotone::{candidate_fit, fit_isotone, MonotoneFit, SolverOptions, TieBreak};
pub use orlicz::{OrliczFamily, OrliczKind, OrliczSpec};
