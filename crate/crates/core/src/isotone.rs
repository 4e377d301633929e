//! Best non-decreasing approximation of a step function under an Orlicz
//! modular, by pool-adjacent-violators with a monotone-root block solver.
//!
//! The scalar subproblem for a block of cells minimizes
//! B(c) = Σᵢ wᵢ·Φ(|fᵢ − c|). Its derivative H(c) = Σᵢ wᵢ·ψ(c − fᵢ) is
//! continuous and non-decreasing with H(min f) ≤ 0 ≤ H(max f), so the
//! minimizer set is the (possibly degenerate) interval of zeros of H inside
//! the block's value hull. Both interval ends are located by bisection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CellGrid, MonotoneStepFunction, StepFunction};
use crate::orlicz::OrliczSpec;

/// Which representative of the block minimizer interval [c_lo, c_hi] to use.
/// Φ need not be strictly convex (φ may have flat segments), so the interval
/// can have positive length; the modular value is indifferent to the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieBreak {
    #[default]
    Midpoint,
    Leftmost,
    Rightmost,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Convergence tolerance for block bisection and the block-merge tie
    /// test, relative to (1 + max|f|).
    pub block_tol: f64,
    pub tie_break: TieBreak,
    pub max_bisection_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            block_tol: 1e-14,
            tie_break: TieBreak::Midpoint,
            max_bisection_iters: 200,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if self.block_tol <= 0.0 || self.block_tol.is_nan() {
            return Err(Error::domain(format!(
                "block_tol must be positive, got {}",
                self.block_tol
            )));
        }
        Ok(())
    }
}

/// A maximal run of cells sharing one fitted level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Block {
    /// First cell index (inclusive).
    pub start: usize,
    /// Last cell index (inclusive).
    pub end: usize,
    /// Representative level, chosen from [level_lo, level_hi] by tie-break.
    pub level: f64,
    /// Leftmost minimizer of the block subproblem.
    pub level_lo: f64,
    /// Rightmost minimizer of the block subproblem.
    pub level_hi: f64,
}

/// Solver output: the block structure, the expanded fitted function, the
/// achieved modular value, and work counters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneFit {
    pub blocks: Vec<Block>,
    pub g_star: MonotoneStepFunction,
    pub modular_value: f64,
    pub merges: usize,
    pub block_solves: usize,
}

/// The minimizer interval of one block subproblem plus its representative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockLevel {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
}

/// Minimize Σᵢ wᵢ·Φ(|fᵢ − c|) over c for one block. Returns the full
/// minimizer interval (leftmost and rightmost zeros of the derivative H)
/// and the representative chosen by the tie-break policy.
pub fn block_minimize(
    spec: &OrliczSpec,
    values: &[f64],
    weights: &[f64],
    opts: &SolverOptions,
) -> Result<BlockLevel> {
    opts.validate()?;
    if values.is_empty() {
        return Err(Error::shape("block_minimize called on an empty block".to_string()));
    }
    if values.len() != weights.len() {
        return Err(Error::shape(format!(
            "block has {} values but {} weights",
            values.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| w <= 0.0 || w.is_nan()) {
        return Err(Error::domain("block weights must be positive".to_string()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("block values must be finite".to_string()));
    }
    let scale = 1.0 + values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    solve_block(spec, values, weights, opts, opts.block_tol * scale)
}

fn solve_block(
    spec: &OrliczSpec,
    values: &[f64],
    weights: &[f64],
    opts: &SolverOptions,
    abs_tol: f64,
) -> Result<BlockLevel> {
    let vmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let vmax = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if vmin == vmax {
        return Ok(BlockLevel {
            lo: vmin,
            hi: vmin,
            level: vmin,
        });
    }

    let deriv = |c: f64| -> f64 {
        values
            .iter()
            .zip(weights)
            .map(|(&f, &w)| w * spec.score(c - f))
            .sum()
    };

    // H(vmin) <= 0 <= H(vmax) holds exactly in floats: every summand of
    // H(vmin) is w·ψ(vmin − fᵢ) with vmin − fᵢ <= 0, and symmetrically
    // at vmax. Equality at an endpoint means the zero set touches it.
    let lo = if deriv(vmin) >= 0.0 {
        vmin
    } else {
        bisect(&deriv, vmin, vmax, abs_tol, opts.max_bisection_iters, ZeroSide::Leftmost)?
    };
    let hi = if deriv(vmax) <= 0.0 {
        vmax
    } else {
        bisect(&deriv, vmin, vmax, abs_tol, opts.max_bisection_iters, ZeroSide::Rightmost)?
    };

    let (lo, hi) = if lo <= hi {
        (lo, hi)
    } else {
        // Two independent bisections of a degenerate interval can land in
        // either order within tolerance; collapse to their midpoint.
        let mid = 0.5 * (lo + hi);
        (mid, mid)
    };
    let level = match opts.tie_break {
        TieBreak::Midpoint => 0.5 * (lo + hi),
        TieBreak::Leftmost => lo,
        TieBreak::Rightmost => hi,
    };
    Ok(BlockLevel { lo, hi, level })
}

enum ZeroSide {
    Leftmost,
    Rightmost,
}

/// Bisect for the leftmost or rightmost zero of a non-decreasing function h
/// on [lo, hi], given h(lo) < 0 < h(hi) around the zero set.
fn bisect(
    h: &dyn Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    abs_tol: f64,
    max_iters: usize,
    side: ZeroSide,
) -> Result<f64> {
    for _ in 0..max_iters {
        if hi - lo <= abs_tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let hm = h(mid);
        match side {
            // Invariant: h(lo) < 0 <= h(hi); converges to inf{c : h(c) >= 0}.
            ZeroSide::Leftmost => {
                if hm >= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            // Invariant: h(lo) <= 0 < h(hi); converges to sup{c : h(c) <= 0}.
            ZeroSide::Rightmost => {
                if hm <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
    }
    if hi - lo <= abs_tol {
        Ok(0.5 * (lo + hi))
    } else {
        Err(Error::NoConvergence {
            context: "block bisection",
            iters: max_iters,
            lo,
            hi,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct WorkBlock {
    start: usize,
    end: usize,
    lo: f64,
    hi: f64,
    level: f64,
}

/// Compute a best non-decreasing approximation to f on the grid.
///
/// Left-to-right scan maintaining a stack of solved blocks: each cell is
/// pushed as a singleton block, and while the top block's representative
/// level fails to exceed its predecessor's (violation, or tie within the
/// block tolerance) the two are merged and re-solved. Surviving blocks have
/// strictly increasing levels, which makes the block structure canonical
/// and the jump diagnostics well-posed.
pub fn fit_isotone(
    spec: &OrliczSpec,
    grid: &CellGrid,
    f: &StepFunction,
    opts: &SolverOptions,
) -> Result<MonotoneFit> {
    opts.validate()?;
    grid.check_compatible(f)?;
    if f.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("input values must be finite".to_string()));
    }
    let values = f.values();
    let weights: Vec<f64> = grid.weights().collect();
    let scale = 1.0 + values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let abs_tol = opts.block_tol * scale;

    let mut stack: Vec<WorkBlock> = Vec::with_capacity(values.len());
    let mut merges = 0usize;
    let mut block_solves = 0usize;

    for i in 0..values.len() {
        let sol = solve_block(spec, &values[i..=i], &weights[i..=i], opts, abs_tol)?;
        block_solves += 1;
        stack.push(WorkBlock {
            start: i,
            end: i,
            lo: sol.lo,
            hi: sol.hi,
            level: sol.level,
        });
        while stack.len() >= 2 {
            let top = stack[stack.len() - 1];
            let prev = stack[stack.len() - 2];
            if top.level > prev.level + abs_tol {
                break;
            }
            stack.pop();
            stack.pop();
            let (start, end) = (prev.start, top.end);
            let sol = solve_block(spec, &values[start..=end], &weights[start..=end], opts, abs_tol)?;
            block_solves += 1;
            merges += 1;
            stack.push(WorkBlock {
                start,
                end,
                lo: sol.lo,
                hi: sol.hi,
                level: sol.level,
            });
        }
    }

    let mut g = Vec::with_capacity(values.len());
    let mut blocks = Vec::with_capacity(stack.len());
    for wb in &stack {
        for _ in wb.start..=wb.end {
            g.push(wb.level);
        }
        blocks.push(Block {
            start: wb.start,
            end: wb.end,
            level: wb.level,
            level_lo: wb.lo,
            level_hi: wb.hi,
        });
    }
    let g_star = MonotoneStepFunction::new(g)?;
    let residuals = StepFunction::new(
        values
            .iter()
            .zip(g_star.values())
            .map(|(f, g)| f - g)
            .collect(),
    );
    let modular_value = spec.modular(grid, &residuals)?;
    Ok(MonotoneFit {
        blocks,
        g_star,
        modular_value,
        merges,
        block_solves,
    })
}

/// Wrap an externally supplied monotone candidate as a `MonotoneFit` so the
/// certificate machinery can evaluate it: blocks are the maximal runs of
/// equal values, each with a degenerate level interval. No optimality is
/// implied — that is exactly what the certificate decides.
pub fn candidate_fit(
    spec: &OrliczSpec,
    grid: &CellGrid,
    f: &StepFunction,
    g: MonotoneStepFunction,
) -> Result<MonotoneFit> {
    grid.check_compatible(f)?;
    grid.check_compatible(g.as_step())?;
    let mut blocks = Vec::new();
    let values = g.values();
    let mut start = 0usize;
    for i in 1..=values.len() {
        if i == values.len() || values[i] != values[start] {
            blocks.push(Block {
                start,
                end: i - 1,
                level: values[start],
                level_lo: values[start],
                level_hi: values[start],
            });
            start = i;
        }
    }
    let residuals = StepFunction::new(
        f.values()
            .iter()
            .zip(values)
            .map(|(fv, gv)| fv - gv)
            .collect(),
    );
    let modular_value = spec.modular(grid, &residuals)?;
    Ok(MonotoneFit {
        blocks,
        g_star: g,
        modular_value,
        merges: 0,
        block_solves: 0,
    })
}
