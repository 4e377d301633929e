//! Refinement studies: fit the same input at a ladder of resolutions and
//! track how the largest interior jump of the fitted function behaves.
//! For inputs that are approximately continuous everywhere the jumps shrink;
//! a genuine discontinuity in the input pins the jump at its true size.

use serde::{Deserialize, Serialize};

use crate::certificate::{certify, jump_scan, CertifyOptions};
use crate::error::Result;
use crate::fixtures::Fixture;
use crate::grid::{CellGrid, StepFunction};
use crate::isotone::{fit_isotone, SolverOptions};
use crate::orlicz::OrliczSpec;
use crate::problem::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub n: usize,
    pub max_jump: f64,
    pub modular_value: f64,
    pub certified: bool,
}

fn study_one(
    spec: &OrliczSpec,
    grid: &CellGrid,
    f: &StepFunction,
    opts: &SolverOptions,
    copts: &CertifyOptions,
) -> Result<StudyRow> {
    let fit = fit_isotone(spec, grid, f, opts)?;
    let report = certify(spec, grid, f, &fit, copts)?;
    let max_jump = jump_scan(grid, &fit, 0.0)
        .into_iter()
        .map(|(_, jump)| jump)
        .fold(0.0f64, f64::max);
    Ok(StudyRow {
        n: grid.n_cells(),
        max_jump,
        modular_value: fit.modular_value,
        certified: report.passed,
    })
}

/// Re-sample an analytic fixture at n, factor·n, …, factor^K·n and fit each.
pub fn refine_study_fixture(
    spec: &OrliczSpec,
    fixture: Fixture,
    base_n: usize,
    factor: usize,
    levels: usize,
    opts: &SolverOptions,
    copts: &CertifyOptions,
) -> Result<Vec<StudyRow>> {
    let mut rows = Vec::with_capacity(levels + 1);
    let mut n = base_n;
    for _ in 0..=levels {
        let Problem { grid, f } = fixture.build(n)?;
        rows.push(study_one(spec, &grid, &f, opts, copts)?);
        n *= factor;
    }
    Ok(rows)
}

/// Refine a user-supplied problem by value replication (the only faithful
/// option for sampled data) and fit each level.
pub fn refine_study_replicated(
    spec: &OrliczSpec,
    grid: &CellGrid,
    f: &StepFunction,
    factor: usize,
    levels: usize,
    opts: &SolverOptions,
    copts: &CertifyOptions,
) -> Result<Vec<StudyRow>> {
    let mut rows = Vec::with_capacity(levels + 1);
    let mut grid = grid.clone();
    let mut f = f.clone();
    rows.push(study_one(spec, &grid, &f, opts, copts)?);
    for _ in 0..levels {
        let (g2, f2) = grid.refine_with(&f, factor)?;
        grid = g2;
        f = f2;
        rows.push(study_one(spec, &grid, &f, opts, copts)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_fixture_jump_is_pinned_at_one() {
        let spec = OrliczSpec::log_shifted();
        let rows = refine_study_fixture(
            &spec,
            Fixture::Step,
            16,
            2,
            3,
            &SolverOptions::default(),
            &CertifyOptions::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert!((row.max_jump - 1.0).abs() < 1e-12, "{row:?}");
            assert!(row.certified);
            assert_eq!(row.modular_value, 0.0);
        }
    }

    #[test]
    fn replicated_study_preserves_modular() {
        let spec = OrliczSpec::power(2.0).unwrap();
        let grid = CellGrid::uniform(0.0, 1.0, 4).unwrap();
        let f = StepFunction::new(vec![1.0, 0.0, 2.0, 1.5]);
        let rows = refine_study_replicated(
            &spec,
            &grid,
            &f,
            2,
            2,
            &SolverOptions::default(),
            &CertifyOptions::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].n, 8);
        for row in &rows {
            assert!((row.modular_value - rows[0].modular_value).abs() < 1e-12);
            assert!(row.certified);
        }
    }
}
