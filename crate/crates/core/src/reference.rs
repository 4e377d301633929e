//! Independent brute-force oracles for the solver, used by tests and the
//! acceptance suite. Deliberately slow and structurally unrelated to the
//! pool-adjacent-violators path: a dynamic program over a finite level grid
//! and an exhaustive scalar scan. Simple enough to trust by inspection.

use crate::error::{Error, Result};
use crate::grid::{CellGrid, MonotoneStepFunction, StepFunction};
use crate::orlicz::OrliczSpec;

/// A strictly increasing set of candidate levels for the DP oracle:
/// the data values, midpoints between consecutive sorted values, and a
/// uniform fill up to a target count. Contains min f and max f.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelGrid {
    levels: Vec<f64>,
}

impl LevelGrid {
    /// Build from data values, padding with a uniform fill so that the total
    /// count reaches `target_count` (when the value range is non-degenerate).
    pub fn build(values: &[f64], target_count: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::shape("level grid needs at least one data value".to_string()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("level grid values must be finite".to_string()));
        }
        let mut sorted: Vec<f64> = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.dedup();

        let mut levels = sorted.clone();
        for w in sorted.windows(2) {
            levels.push(0.5 * (w[0] + w[1]));
        }
        let (lo, hi) = (sorted[0], *sorted.last().unwrap());
        if hi > lo && target_count > levels.len() {
            let fill = target_count - levels.len();
            for k in 0..fill {
                levels.push(lo + (hi - lo) * ((k + 1) as f64 / (fill + 1) as f64));
            }
        }
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        levels.dedup();
        Ok(LevelGrid { levels })
    }

    pub fn from_levels(mut levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::shape("level grid must be non-empty".to_string()));
        }
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        levels.dedup();
        Ok(LevelGrid { levels })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Exact DP over cells × levels with the prefix-min recurrence
/// D(i, j) = cost(i, Lⱼ) + min_{j′ ≤ j} D(i−1, j′).
/// Monotonicity of the reconstructed function is structural: the predecessor
/// of level j is always a level no higher than j.
fn dp_fit(
    grid: &CellGrid,
    f: &StepFunction,
    levels: &LevelGrid,
    cell_cost: impl Fn(usize, f64) -> f64,
) -> Result<(MonotoneStepFunction, f64)> {
    grid.check_compatible(f)?;
    let n = f.len();
    let m = levels.len();
    let ls = levels.levels();

    // prefix_best[j] holds P(i, j) = min_{j' <= j} D(i, j') for the row most
    // recently completed; prefix_arg[i][j] is the argmin achieving it.
    let mut prefix_best = vec![0.0f64; m];
    let mut prefix_arg: Vec<Vec<u32>> = Vec::with_capacity(n);

    for i in 0..n {
        let mut row = Vec::with_capacity(m);
        for (j, &level) in ls.iter().enumerate() {
            let carry = if i == 0 { 0.0 } else { prefix_best[j] };
            row.push(cell_cost(i, level) + carry);
        }
        let mut best = f64::INFINITY;
        let mut arg = 0u32;
        let mut args = vec![0u32; m];
        for j in 0..m {
            if row[j] < best {
                best = row[j];
                arg = j as u32;
            }
            prefix_best[j] = best;
            args[j] = arg;
        }
        prefix_arg.push(args);
    }

    // Optimum over the last row; then, since the carry into cell i at level j
    // was P(i−1, j), the best predecessor level is prefix_arg[i−1][j].
    let value = prefix_best[m - 1];
    let mut j = prefix_arg[n - 1][m - 1] as usize;
    let mut fitted = vec![0.0f64; n];
    for i in (0..n).rev() {
        fitted[i] = ls[j];
        if i > 0 {
            j = prefix_arg[i - 1][j] as usize;
        }
    }
    let g = MonotoneStepFunction::new(fitted)?;
    Ok((g, value))
}

/// Best monotone step function with values restricted to the level grid,
/// under the modular objective. The value converges to the true optimum
/// from above as the level grid is refined.
pub fn brute_force_fit(
    spec: &OrliczSpec,
    grid: &CellGrid,
    f: &StepFunction,
    levels: &LevelGrid,
) -> Result<(MonotoneStepFunction, f64)> {
    let values = f.values().to_vec();
    let weights: Vec<f64> = grid.weights().collect();
    dp_fit(grid, f, levels, move |i, level| {
        weights[i] * spec.big_phi_nn((values[i] - level).abs())
    })
}

/// The same DP under the plain L¹ cost Σ wᵢ·|fᵢ − Lⱼ|. The absolute value
/// is outside the admissible generator class (its derivative does not vanish
/// at 0⁺), so this path exists only for clearly-labeled comparative studies.
pub fn brute_force_fit_l1(
    grid: &CellGrid,
    f: &StepFunction,
    levels: &LevelGrid,
) -> Result<(MonotoneStepFunction, f64)> {
    let values = f.values().to_vec();
    let weights: Vec<f64> = grid.weights().collect();
    dp_fit(grid, f, levels, move |i, level| {
        weights[i] * (values[i] - level).abs()
    })
}

/// Exhaustive scan of the block objective Σᵢ wᵢ·Φ(|fᵢ − c|) over an
/// arithmetic grid of c values. Oracle for `block_minimize`.
pub fn scalar_scan_minimize(
    spec: &OrliczSpec,
    values: &[f64],
    weights: &[f64],
    lo: f64,
    hi: f64,
    step: f64,
) -> Result<(f64, f64)> {
    if values.is_empty() || values.len() != weights.len() {
        return Err(Error::shape("scan requires matching non-empty values and weights".to_string()));
    }
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::domain(format!("scan requires lo < hi, got [{lo}, {hi}]")));
    }
    if step <= 0.0 || step.is_nan() {
        return Err(Error::domain(format!("scan step must be positive, got {step}")));
    }
    let objective = |c: f64| -> f64 {
        values
            .iter()
            .zip(weights)
            .map(|(&f, &w)| w * spec.big_phi_nn((f - c).abs()))
            .sum()
    };
    let mut best_c = lo;
    let mut best_val = objective(lo);
    let steps = ((hi - lo) / step).floor() as usize;
    for k in 1..=steps {
        let c = lo + k as f64 * step;
        let v = objective(c);
        if v < best_val {
            best_val = v;
            best_c = c;
        }
    }
    let v = objective(hi);
    if v < best_val {
        best_val = v;
        best_c = hi;
    }
    Ok((best_c, best_val))
}
