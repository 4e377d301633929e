//! Discretization of [a,b] into cells with Lebesgue weights.
//!
//! Every function in the library is piecewise constant on a `CellGrid`, so
//! every integral (modular, residual profile, directional derivative) is a
//! finite exact sum and no quadrature error contaminates certificate
//! tolerances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition a = x₀ < x₁ < … < x_n = b. Cell i spans [xᵢ, xᵢ₊₁) with
/// Lebesgue weight wᵢ = xᵢ₊₁ − xᵢ (the last cell is closed at b).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CellGrid {
    breakpoints: Vec<f64>,
}

impl TryFrom<Vec<f64>> for CellGrid {
    type Error = Error;
    fn try_from(breakpoints: Vec<f64>) -> Result<Self> {
        CellGrid::new(breakpoints)
    }
}

impl From<CellGrid> for Vec<f64> {
    fn from(grid: CellGrid) -> Vec<f64> {
        grid.breakpoints
    }
}

impl CellGrid {
    pub fn new(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::domain("a grid needs at least one cell (two breakpoints)".to_string()));
        }
        if breakpoints.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("grid breakpoints must be finite".to_string()));
        }
        for w in breakpoints.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::domain(format!(
                    "grid breakpoints must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(CellGrid { breakpoints })
    }

    /// n equal cells of width (b−a)/n.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if a.is_nan() || b.is_nan() || a >= b {
            return Err(Error::domain(format!("uniform grid requires a < b, got [{a}, {b}]")));
        }
        if n == 0 {
            return Err(Error::domain("uniform grid requires n >= 1".to_string()));
        }
        let mut breakpoints = Vec::with_capacity(n + 1);
        for i in 0..=n {
            breakpoints.push(a + (b - a) * (i as f64 / n as f64));
        }
        breakpoints[n] = b;
        CellGrid::new(breakpoints)
    }

    /// Graded mesh xᵢ = a + (b−a)·(i/n)^gamma; gamma > 1 clusters cells near
    /// a, resolving endpoint singularities such as x^{-1/2} on (0,1].
    pub fn graded(a: f64, b: f64, n: usize, gamma: f64) -> Result<Self> {
        if a.is_nan() || b.is_nan() || a >= b {
            return Err(Error::domain(format!("graded grid requires a < b, got [{a}, {b}]")));
        }
        if n == 0 {
            return Err(Error::domain("graded grid requires n >= 1".to_string()));
        }
        if gamma.is_nan() || gamma <= 0.0 || !gamma.is_finite() {
            return Err(Error::domain(format!("grading exponent must be positive, got {gamma}")));
        }
        let mut breakpoints = Vec::with_capacity(n + 1);
        for i in 0..=n {
            breakpoints.push(a + (b - a) * (i as f64 / n as f64).powf(gamma));
        }
        breakpoints[n] = b;
        CellGrid::new(breakpoints)
    }

    pub fn n_cells(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn a(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn b(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    #[inline]
    pub fn weight(&self, cell: usize) -> f64 {
        self.breakpoints[cell + 1] - self.breakpoints[cell]
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.breakpoints.windows(2).map(|w| w[1] - w[0])
    }

    pub fn midpoint(&self, cell: usize) -> f64 {
        0.5 * (self.breakpoints[cell] + self.breakpoints[cell + 1])
    }

    pub fn midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.breakpoints.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }

    /// Index of the cell containing x (cells half-open on the right, last
    /// cell closed), or None outside [a,b].
    pub fn cell_containing(&self, x: f64) -> Option<usize> {
        if x < self.a() || x > self.b() {
            return None;
        }
        if x == self.b() {
            return Some(self.n_cells() - 1);
        }
        match self
            .breakpoints
            .binary_search_by(|bp| bp.partial_cmp(&x).unwrap())
        {
            Ok(i) => Some(i.min(self.n_cells() - 1)),
            Err(i) => Some(i - 1),
        }
    }

    pub(crate) fn check_compatible(&self, s: &StepFunction) -> Result<()> {
        if s.len() != self.n_cells() {
            return Err(Error::shape(format!(
                "step function has {} values but grid has {} cells",
                s.len(),
                self.n_cells()
            )));
        }
        Ok(())
    }

    /// Exact ∫ₐᵇ s dμ = Σᵢ wᵢ·sᵢ.
    pub fn integrate(&self, s: &StepFunction) -> Result<f64> {
        self.check_compatible(s)?;
        Ok(self.weights().zip(s.values()).map(|(w, v)| w * v).sum())
    }

    /// Split every cell into `factor` equal subcells.
    pub fn refine(&self, factor: usize) -> Result<CellGrid> {
        if factor == 0 {
            return Err(Error::domain("refinement factor must be >= 1".to_string()));
        }
        if factor == 1 {
            return Ok(self.clone());
        }
        let mut breakpoints = Vec::with_capacity(self.n_cells() * factor + 1);
        for cell in 0..self.n_cells() {
            let (left, right) = (self.breakpoints[cell], self.breakpoints[cell + 1]);
            for j in 0..factor {
                breakpoints.push(left + (right - left) * (j as f64 / factor as f64));
            }
        }
        breakpoints.push(self.b());
        CellGrid::new(breakpoints)
    }

    /// Refine the grid and replicate the step values onto the subcells.
    /// `integrate` and any modular are invariant under this map.
    pub fn refine_with(&self, s: &StepFunction, factor: usize) -> Result<(CellGrid, StepFunction)> {
        self.check_compatible(s)?;
        let grid = self.refine(factor)?;
        let mut values = Vec::with_capacity(s.len() * factor);
        for &v in s.values() {
            values.extend(std::iter::repeat_n(v, factor));
        }
        Ok((grid, StepFunction::new(values)))
    }
}

/// A piecewise-constant function: one value per cell of an associated grid.
/// The pairing with a grid is by convention and checked by cell count at
/// every operation that consumes both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StepFunction {
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(values: Vec<f64>) -> Self {
        StepFunction { values }
    }

    /// Midpoint sampling of a pointwise function. Midpoints keep unbounded
    /// endpoint examples (x^{-1/2} near 0) finite.
    pub fn from_fn(grid: &CellGrid, f: impl Fn(f64) -> f64) -> Self {
        StepFunction {
            values: grid.midpoints().map(f).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

/// A step function whose values are non-decreasing — an element of the
/// approximation cone. Construction validates monotonicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepFunction", into = "StepFunction")]
pub struct MonotoneStepFunction {
    inner: StepFunction,
}

impl TryFrom<StepFunction> for MonotoneStepFunction {
    type Error = Error;
    fn try_from(s: StepFunction) -> Result<Self> {
        MonotoneStepFunction::from_step(s)
    }
}

impl From<MonotoneStepFunction> for StepFunction {
    fn from(m: MonotoneStepFunction) -> StepFunction {
        m.inner
    }
}

impl MonotoneStepFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::from_step(StepFunction::new(values))
    }

    pub fn from_step(s: StepFunction) -> Result<Self> {
        if s.values().iter().any(|v| v.is_nan()) {
            return Err(Error::domain("monotone step function must not contain NaN".to_string()));
        }
        if !s.is_non_decreasing() {
            return Err(Error::domain("step function values are not non-decreasing".to_string()));
        }
        Ok(MonotoneStepFunction { inner: s })
    }

    pub fn as_step(&self) -> &StepFunction {
        &self.inner
    }

    pub fn into_step(self) -> StepFunction {
        self.inner
    }

    pub fn values(&self) -> &[f64] {
        self.inner.values()
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }
}
