//! Built-in analytic inputs for refinement studies and demos: a continuous
//! oscillation, an unbounded-but-integrable endpoint singularity on a graded
//! mesh, and a monotone step (whose jump no refinement can remove).

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{CellGrid, StepFunction};
use crate::problem::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    /// f(x) = sin(3x) on [0, 3]: continuous, so fitted jumps must shrink
    /// under refinement.
    Sin,
    /// f(x) = x^{-1/2} on (0, 1], midpoint-sampled on a quadratically graded
    /// mesh: unbounded yet integrable against every built-in Φ.
    InvSqrt,
    /// f = 1 on [0.5, 1], else 0: the jump persists at every resolution.
    Step,
}

impl Fixture {
    pub const ALL: [Fixture; 3] = [Fixture::Sin, Fixture::InvSqrt, Fixture::Step];

    pub fn name(&self) -> &'static str {
        match self {
            Fixture::Sin => "sin",
            Fixture::InvSqrt => "inv-sqrt",
            Fixture::Step => "step",
        }
    }

    /// Midpoint-sample the fixture at resolution n.
    pub fn build(&self, n: usize) -> Result<Problem> {
        match self {
            Fixture::Sin => {
                let grid = CellGrid::uniform(0.0, 3.0, n)?;
                let f = StepFunction::from_fn(&grid, |x| (3.0 * x).sin());
                Problem::new(grid, f)
            }
            Fixture::InvSqrt => {
                let grid = CellGrid::graded(0.0, 1.0, n, 2.0)?;
                let f = StepFunction::from_fn(&grid, |x| x.powf(-0.5));
                Problem::new(grid, f)
            }
            Fixture::Step => {
                let grid = CellGrid::uniform(0.0, 1.0, n)?;
                let f = StepFunction::from_fn(&grid, |x| if x >= 0.5 { 1.0 } else { 0.0 });
                Problem::new(grid, f)
            }
        }
    }
}

impl FromStr for Fixture {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sin" => Ok(Fixture::Sin),
            "inv-sqrt" | "invsqrt" | "inv_sqrt" => Ok(Fixture::InvSqrt),
            "step" => Ok(Fixture::Step),
            other => Err(Error::domain(format!(
                "unknown fixture '{other}'; available: sin, inv-sqrt, step"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build_at_any_resolution() {
        for fixture in Fixture::ALL {
            for n in [4, 64, 512] {
                let p = fixture.build(n).unwrap();
                assert_eq!(p.f.len(), n);
                assert!(p.f.values().iter().all(|v| v.is_finite()), "{fixture:?}");
            }
        }
    }

    #[test]
    fn inv_sqrt_is_finite_but_large_near_zero() {
        let p = Fixture::InvSqrt.build(512).unwrap();
        let first = p.f.values()[0];
        assert!(first > 100.0, "graded mesh should resolve the singularity, got {first}");
        assert!(first.is_finite());
    }

    #[test]
    fn step_is_monotone() {
        let p = Fixture::Step.build(64).unwrap();
        assert!(p.f.is_non_decreasing());
    }

    #[test]
    fn fixture_names_round_trip() {
        for fixture in Fixture::ALL {
            assert_eq!(fixture.name().parse::<Fixture>().unwrap(), fixture);
        }
        assert!("nope".parse::<Fixture>().is_err());
    }
}
