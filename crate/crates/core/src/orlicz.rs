//! Admissible convex functions Φ, given through their derivatives φ, and the
//! modular / norm functionals built from them.
//!
//! A spec describes Φ(x) = ∫₀ˣ φ(t) dt for a non-decreasing, continuous φ
//! with φ(0⁺) = 0 and φ(t) > 0 for t > 0. When φ is unbounded the function
//! is an N-function; when φ is bounded it is an N∞-function (Φ then grows at
//! most linearly at infinity). All built-in families carry closed-form
//! primitives; no quadrature runs in any hot path.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CellGrid, StepFunction};

/// A convex generator family, identified by its derivative φ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum OrliczFamily {
    /// φ(t) = t^{p−1}, Φ(x) = x^p / p. Requires p > 1.
    Power { p: f64 },
    /// φ(t) = t/(1+t), Φ(x) = x − ln(1+x). Bounded φ.
    LogShifted,
    /// φ(t) = arctan(t), Φ(x) = x·arctan(x) − ½·ln(1+x²). Bounded φ.
    #[serde(rename = "arctan")]
    ArctanPrimitive,
    /// φ(t) = 1 − e^{−t}, Φ(x) = x + e^{−x} − 1. Bounded φ.
    ExpSaturating,
    /// φ(t) = e^t − 1, Φ(x) = e^x − x − 1. Violates the Δ₂ condition;
    /// shipped for negative testing of the Δ₂ gate.
    Exponential,
    /// φ linearly interpolated between user knots (t, φ(t)), constant beyond
    /// the last knot. Φ is the exact piecewise-quadratic primitive.
    #[serde(rename = "piecewise_phi")]
    PiecewiseLinearPhi { knots: Vec<(f64, f64)> },
}

/// Whether φ is unbounded (N-function) or bounded (N∞-function).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrliczKind {
    NFunction,
    NInfinityFunction,
}

/// Precomputed interpolation state for `PiecewiseLinearPhi`.
#[derive(Debug, Clone, PartialEq)]
struct PiecewisePhi {
    knots: Vec<(f64, f64)>,
    /// Cumulative ∫₀^{t_j} φ for each knot j (trapezoid-exact).
    cum_area: Vec<f64>,
}

impl PiecewisePhi {
    fn build(knots: &[(f64, f64)]) -> Self {
        let mut cum_area = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        cum_area.push(0.0);
        for w in knots.windows(2) {
            let (t0, y0) = w[0];
            let (t1, y1) = w[1];
            acc += (t1 - t0) * 0.5 * (y0 + y1);
            cum_area.push(acc);
        }
        PiecewisePhi {
            knots: knots.to_vec(),
            cum_area,
        }
    }

    /// Index of the segment [t_j, t_{j+1}) containing t, or the last segment
    /// index when t lies beyond the final knot.
    fn segment(&self, t: f64) -> usize {
        match self
            .knots
            .binary_search_by(|(a, _)| a.partial_cmp(&t).unwrap())
        {
            Ok(j) => j.min(self.knots.len() - 2),
            Err(j) => j.saturating_sub(1).min(self.knots.len() - 2),
        }
    }

    fn phi(&self, t: f64) -> f64 {
        let (t_last, y_last) = *self.knots.last().unwrap();
        if t >= t_last {
            return y_last;
        }
        let j = self.segment(t);
        let (t0, y0) = self.knots[j];
        let (t1, y1) = self.knots[j + 1];
        y0 + (y1 - y0) * (t - t0) / (t1 - t0)
    }

    fn big_phi(&self, x: f64) -> f64 {
        let (t_last, y_last) = *self.knots.last().unwrap();
        if x >= t_last {
            return self.cum_area[self.knots.len() - 1] + y_last * (x - t_last);
        }
        let j = self.segment(x);
        let (t0, y0) = self.knots[j];
        self.cum_area[j] + (x - t0) * 0.5 * (y0 + self.phi(x))
    }
}

/// A validated Orlicz generator: family, derived kind, and the Δ₂ constant
/// when known in closed form.
///
/// Serializes as its family tag alone, e.g. `{"family":"power","p":2.0}`;
/// derived state is rebuilt on deserialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OrliczFamily", into = "OrliczFamily")]
pub struct OrliczSpec {
    family: OrliczFamily,
    kind: OrliczKind,
    delta2_constant: Option<f64>,
    piecewise: Option<PiecewisePhi>,
}

impl TryFrom<OrliczFamily> for OrliczSpec {
    type Error = Error;
    fn try_from(family: OrliczFamily) -> Result<Self> {
        OrliczSpec::new(family)
    }
}

impl From<OrliczSpec> for OrliczFamily {
    fn from(spec: OrliczSpec) -> OrliczFamily {
        spec.family
    }
}

impl OrliczSpec {
    pub fn new(family: OrliczFamily) -> Result<Self> {
        let (kind, delta2_constant, piecewise) = match &family {
            OrliczFamily::Power { p } => {
                if !p.is_finite() || *p <= 1.0 {
                    return Err(Error::domain(format!(
                        "power exponent must satisfy p > 1 (got p = {p}); \
                         p = 1 gives phi(t) = 1 with phi(0+) = 1 != 0, which is \
                         outside the admissible class (use the L1 oracle escape \
                         hatch for comparative studies)"
                    )));
                }
                (OrliczKind::NFunction, Some(2f64.powf(*p)), None)
            }
            OrliczFamily::LogShifted => (OrliczKind::NInfinityFunction, Some(4.0), None),
            OrliczFamily::ArctanPrimitive => (OrliczKind::NInfinityFunction, None, None),
            OrliczFamily::ExpSaturating => (OrliczKind::NInfinityFunction, None, None),
            OrliczFamily::Exponential => (OrliczKind::NFunction, None, None),
            OrliczFamily::PiecewiseLinearPhi { knots } => {
                validate_knots(knots)?;
                let n = knots.len();
                let final_slope = (knots[n - 1].1 - knots[n - 2].1) / (knots[n - 1].0 - knots[n - 2].0);
                let kind = if final_slope == 0.0 {
                    OrliczKind::NInfinityFunction
                } else {
                    OrliczKind::NFunction
                };
                (kind, None, Some(PiecewisePhi::build(knots)))
            }
        };
        Ok(OrliczSpec {
            family,
            kind,
            delta2_constant,
            piecewise,
        })
    }

    pub fn power(p: f64) -> Result<Self> {
        Self::new(OrliczFamily::Power { p })
    }

    pub fn log_shifted() -> Self {
        Self::new(OrliczFamily::LogShifted).unwrap()
    }

    pub fn arctan_primitive() -> Self {
        Self::new(OrliczFamily::ArctanPrimitive).unwrap()
    }

    pub fn exp_saturating() -> Self {
        Self::new(OrliczFamily::ExpSaturating).unwrap()
    }

    pub fn exponential() -> Self {
        Self::new(OrliczFamily::Exponential).unwrap()
    }

    pub fn piecewise_phi(knots: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(OrliczFamily::PiecewiseLinearPhi { knots })
    }

    /// Store an explicit Δ₂ constant (overriding any closed-form one), e.g.
    /// an empirical estimate to be re-checked by `delta2_estimate`.
    pub fn with_delta2_constant(mut self, k2: f64) -> Result<Self> {
        if !k2.is_finite() || k2 <= 0.0 {
            return Err(Error::domain(format!("delta2 constant must be positive, got {k2}")));
        }
        self.delta2_constant = Some(k2);
        Ok(self)
    }

    pub fn family(&self) -> &OrliczFamily {
        &self.family
    }

    pub fn kind(&self) -> OrliczKind {
        self.kind
    }

    pub fn delta2_constant(&self) -> Option<f64> {
        self.delta2_constant
    }

    /// The derivative φ(t). Errors on negative t.
    pub fn phi(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::domain(format!("phi requires t >= 0, got {t}")));
        }
        Ok(self.phi_nn(t))
    }

    /// φ on t ≥ 0, unchecked domain (callers guarantee non-negativity).
    #[inline]
    pub(crate) fn phi_nn(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match &self.family {
            OrliczFamily::Power { p } => t.powf(p - 1.0),
            OrliczFamily::LogShifted => t / (1.0 + t),
            OrliczFamily::ArctanPrimitive => t.atan(),
            OrliczFamily::ExpSaturating => -f64::exp_m1(-t),
            OrliczFamily::Exponential => f64::exp_m1(t),
            OrliczFamily::PiecewiseLinearPhi { .. } => {
                self.piecewise.as_ref().expect("built at validation").phi(t)
            }
        }
    }

    /// The primitive Φ(x) = ∫₀ˣ φ. Errors on negative x.
    pub fn big_phi(&self, x: f64) -> Result<f64> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::domain(format!("big_phi requires x >= 0, got {x}")));
        }
        Ok(self.big_phi_nn(x))
    }

    /// Φ on x ≥ 0, unchecked domain. Closed forms throughout, with series
    /// branches near 0 where the naive expression cancels catastrophically
    /// (x − ln(1+x) loses ~x digits of the x²/2-sized result).
    #[inline]
    pub(crate) fn big_phi_nn(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        match &self.family {
            OrliczFamily::Power { p } => x.powf(*p) / p,
            OrliczFamily::LogShifted => {
                if x > 0.25 {
                    x - f64::ln_1p(x)
                } else {
                    // Σ_{k≥2} (−1)^k x^k / k
                    alternating_series(x, 2, |k| 1.0 / k as f64)
                }
            }
            OrliczFamily::ArctanPrimitive => {
                if x > 0.25 {
                    x * x.atan() - 0.5 * f64::ln_1p(x * x)
                } else {
                    // Σ_{k≥1} (−1)^{k+1} x^{2k} / ((2k−1)(2k))
                    let x2 = x * x;
                    let mut term = x2 * 0.5;
                    let mut acc = term;
                    let mut k = 2usize;
                    while term.abs() > f64::EPSILON * acc.abs() {
                        term = -term;
                        let prev_denom = ((2 * k - 3) * (2 * k - 2)) as f64;
                        let denom = ((2 * k - 1) * (2 * k)) as f64;
                        term *= x2 * prev_denom / denom;
                        acc += term;
                        k += 1;
                    }
                    acc
                }
            }
            OrliczFamily::ExpSaturating => {
                if x > 0.25 {
                    x + f64::exp_m1(-x)
                } else {
                    // Σ_{k≥2} (−x)^k / k!
                    factorial_tail_series(-x)
                }
            }
            OrliczFamily::Exponential => {
                if x > 0.25 {
                    f64::exp_m1(x) - x
                } else {
                    factorial_tail_series(x)
                }
            }
            OrliczFamily::PiecewiseLinearPhi { .. } => self
                .piecewise
                .as_ref()
                .expect("built at validation")
                .big_phi(x),
        }
    }

    /// The odd score ψ(u) = sgn(u)·φ(|u|), with sgn(0) = 0. Continuous
    /// because φ(0⁺) = 0; this is the pointwise kernel of every optimality
    /// condition in the certificate module.
    #[inline]
    pub fn score(&self, u: f64) -> f64 {
        if u > 0.0 {
            self.phi_nn(u)
        } else if u < 0.0 {
            -self.phi_nn(-u)
        } else {
            0.0
        }
    }

    /// Empirically probe the Δ₂ condition Φ(2x) ≤ K₂·Φ(x) on a log-spaced
    /// grid. When a closed-form constant is stored, `satisfied` reports
    /// whether it bounds every observed ratio; without one, only the observed
    /// supremum is meaningful and callers compare it to their own threshold.
    pub fn delta2_estimate(&self, x_min: f64, x_max: f64, n_points: usize) -> Result<Delta2Report> {
        if x_min <= 0.0 || x_min.is_nan() || x_max <= x_min || x_max.is_nan() {
            return Err(Error::domain(format!(
                "delta2_estimate requires 0 < x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 2 {
            return Err(Error::domain("delta2_estimate requires n_points >= 2".to_string()));
        }
        let log_lo = x_min.ln();
        let log_hi = x_max.ln();
        let mut sup_ratio = f64::NEG_INFINITY;
        let mut sup_x = x_min;
        for i in 0..n_points {
            let t = i as f64 / (n_points - 1) as f64;
            let x = (log_lo + t * (log_hi - log_lo)).exp();
            let ratio = self.big_phi_nn(2.0 * x) / self.big_phi_nn(x);
            if ratio > sup_ratio {
                sup_ratio = ratio;
                sup_x = x;
            }
        }
        let (satisfied, violating_x) = match self.delta2_constant {
            Some(k2) => {
                let ok = sup_ratio <= k2 * (1.0 + 1e-12);
                (ok, if ok { None } else { Some(sup_x) })
            }
            None => (sup_ratio.is_finite(), None),
        };
        Ok(Delta2Report {
            sup_ratio,
            violating_x,
            satisfied,
        })
    }

    /// The modular ∫ₐᵇ Φ(|r|) dμ of a step function of residuals: exact
    /// weighted sum Σᵢ wᵢ·Φ(|rᵢ|).
    pub fn modular(&self, grid: &CellGrid, residuals: &StepFunction) -> Result<f64> {
        grid.check_compatible(residuals)?;
        let mut acc = 0.0;
        for (w, r) in grid.weights().zip(residuals.values()) {
            acc += w * self.big_phi_nn(r.abs());
        }
        Ok(acc)
    }

    /// The Luxemburg norm inf{λ > 0 : ∫Φ(|f|/λ)dμ ≤ 1}, located by
    /// doubling/halving from λ = 1 until the modular brackets 1, then
    /// bisection until the modular is within `tol` of 1. The map
    /// λ ↦ ∫Φ(|f|/λ)dμ is strictly decreasing for nonzero f, so the
    /// bracket is valid. Identically-zero input returns 0.
    pub fn luxemburg_norm(&self, grid: &CellGrid, values: &StepFunction, tol: f64) -> Result<f64> {
        if tol <= 0.0 || tol.is_nan() {
            return Err(Error::domain(format!("luxemburg_norm requires tol > 0, got {tol}")));
        }
        grid.check_compatible(values)?;
        if values.values().iter().all(|&v| v == 0.0) {
            return Ok(0.0);
        }
        let modular_at = |lambda: f64| -> f64 {
            let mut acc = 0.0;
            for (w, v) in grid.weights().zip(values.values()) {
                acc += w * self.big_phi_nn(v.abs() / lambda);
            }
            acc
        };

        let mut lambda = 1.0;
        let mut m = modular_at(lambda);
        if (m - 1.0).abs() <= tol {
            return Ok(lambda);
        }
        let (mut lo, mut hi) = if m > 1.0 {
            // Double upward until the modular drops to 1 or below.
            let mut steps = 0;
            while m > 1.0 {
                lambda *= 2.0;
                m = modular_at(lambda);
                steps += 1;
                if steps > 1100 {
                    return Err(Error::NoConvergence {
                        context: "luxemburg bracket (doubling)",
                        iters: steps,
                        lo: lambda / 2.0,
                        hi: lambda,
                    });
                }
            }
            (lambda / 2.0, lambda)
        } else {
            let mut steps = 0;
            while m < 1.0 {
                lambda *= 0.5;
                m = modular_at(lambda);
                steps += 1;
                if steps > 1100 {
                    return Err(Error::NoConvergence {
                        context: "luxemburg bracket (halving)",
                        iters: steps,
                        lo: lambda,
                        hi: lambda * 2.0,
                    });
                }
            }
            (lambda, lambda * 2.0)
        };

        // Invariant: modular(lo) >= 1 >= modular(hi).
        for _ in 0..20_000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let m = modular_at(mid);
            if (m - 1.0).abs() <= tol {
                return Ok(mid);
            }
            if m > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::NoConvergence {
            context: "luxemburg bisection",
            iters: 20_000,
            lo,
            hi,
        })
    }
}

/// Result of an empirical Δ₂ probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delta2Report {
    /// sup of Φ(2x)/Φ(x) over the probe grid.
    pub sup_ratio: f64,
    /// A probe point whose ratio exceeds the stored constant, when one fails.
    pub violating_x: Option<f64>,
    pub satisfied: bool,
}

fn validate_knots(knots: &[(f64, f64)]) -> Result<()> {
    if knots.len() < 2 {
        return Err(Error::domain("piecewise phi needs at least 2 knots".to_string()));
    }
    if knots.iter().any(|(t, y)| !t.is_finite() || !y.is_finite()) {
        return Err(Error::domain("piecewise phi knots must be finite".to_string()));
    }
    if knots[0] != (0.0, 0.0) {
        return Err(Error::domain(format!(
            "first knot must be (0, 0) so that phi(0) = 0, got {:?}",
            knots[0]
        )));
    }
    for w in knots.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::domain(format!(
                "knot abscissae must be strictly increasing, got {} then {}",
                w[0].0, w[1].0
            )));
        }
        if w[1].1 < w[0].1 {
            return Err(Error::domain(format!(
                "knot ordinates must be non-decreasing, got {} then {}",
                w[0].1, w[1].1
            )));
        }
    }
    if knots[1].1 <= 0.0 {
        return Err(Error::domain(
            "second knot ordinate must be positive so that phi(t) > 0 for t > 0".to_string(),
        ));
    }
    Ok(())
}

/// Σ_{k≥start} (−1)^k x^k · coeff(k), for |x| small enough that terms decay.
fn alternating_series(x: f64, start: usize, coeff: impl Fn(usize) -> f64) -> f64 {
    let mut pow = x.powi(start as i32);
    let mut sign = if start.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut acc = 0.0;
    for k in start.. {
        let term = sign * pow * coeff(k);
        acc += term;
        if term.abs() <= f64::EPSILON * acc.abs() {
            break;
        }
        pow *= x;
        sign = -sign;
    }
    acc
}

/// Σ_{k≥2} z^k / k! (= e^z − z − 1), accurate for |z| ≤ 0.25.
fn factorial_tail_series(z: f64) -> f64 {
    let mut term = z * z / 2.0;
    let mut acc = term;
    let mut k = 3usize;
    while term.abs() > f64::EPSILON * acc.abs() {
        term *= z / k as f64;
        acc += term;
        k += 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CellGrid;
    use approx::assert_relative_eq;

    #[test]
    fn phi_closed_forms() {
        assert_eq!(OrliczSpec::power(2.0).unwrap().phi(3.0).unwrap(), 3.0);
        assert_eq!(OrliczSpec::log_shifted().phi(1.0).unwrap(), 0.5);
        assert_relative_eq!(
            OrliczSpec::arctan_primitive().phi(1.0).unwrap(),
            std::f64::consts::FRAC_PI_4,
            max_relative = 1e-15
        );
    }

    #[test]
    fn phi_rejects_negative_argument() {
        assert!(OrliczSpec::log_shifted().phi(-0.1).is_err());
        assert!(OrliczSpec::log_shifted().big_phi(-0.1).is_err());
    }

    #[test]
    fn big_phi_closed_forms() {
        assert_eq!(OrliczSpec::power(2.0).unwrap().big_phi(3.0).unwrap(), 4.5);
        for spec in [
            OrliczSpec::power(2.0).unwrap(),
            OrliczSpec::log_shifted(),
            OrliczSpec::arctan_primitive(),
            OrliczSpec::exp_saturating(),
            OrliczSpec::exponential(),
        ] {
            assert_eq!(spec.big_phi(0.0).unwrap(), 0.0);
        }
        // Oracle: quadrature of arctan over [0,1] = pi/4 - ln2/2.
        assert_relative_eq!(
            OrliczSpec::arctan_primitive().big_phi(1.0).unwrap(),
            0.4388245731174757,
            max_relative = 1e-12
        );
    }

    #[test]
    fn big_phi_series_branch_is_accurate_near_zero() {
        // Values computed with 30-digit arithmetic.
        let x = 1e-8;
        assert_relative_eq!(
            OrliczSpec::log_shifted().big_phi(x).unwrap(),
            4.999999966666667e-17,
            max_relative = 1e-13
        );
        // Ratio test that catastrophic cancellation would break.
        let r = OrliczSpec::log_shifted().big_phi(2.0 * x).unwrap()
            / OrliczSpec::log_shifted().big_phi(x).unwrap();
        assert!(r < 4.0 && r > 3.999_999_8, "ratio {r}");
    }

    #[test]
    fn power_requires_p_above_one() {
        let err = OrliczSpec::power(1.0).unwrap_err();
        assert!(err.to_string().contains("phi(0+)"), "diagnostic: {err}");
        assert!(OrliczSpec::power(0.5).is_err());
        assert!(OrliczSpec::power(f64::NAN).is_err());
    }

    #[test]
    fn score_is_odd_and_zero_at_zero() {
        let spec = OrliczSpec::power(2.0).unwrap();
        assert_eq!(spec.score(-2.0), -2.0);
        assert_eq!(spec.score(0.0), 0.0);
        let logs = OrliczSpec::log_shifted();
        assert_eq!(logs.score(1.0), 0.5);
        assert_eq!(logs.score(-1.0), -0.5);
        assert_eq!(logs.score(0.0), 0.0);
    }

    #[test]
    fn piecewise_phi_validation() {
        assert!(OrliczSpec::piecewise_phi(vec![(0.0, 0.0), (1.0, 0.5)]).is_ok());
        // first knot not at origin
        assert!(OrliczSpec::piecewise_phi(vec![(0.5, 0.0), (1.0, 0.5)]).is_err());
        // non-increasing abscissae
        assert!(OrliczSpec::piecewise_phi(vec![(0.0, 0.0), (1.0, 0.5), (1.0, 0.7)]).is_err());
        // decreasing ordinates
        assert!(OrliczSpec::piecewise_phi(vec![(0.0, 0.0), (1.0, 0.5), (2.0, 0.4)]).is_err());
        // flat-zero first segment violates positivity
        assert!(OrliczSpec::piecewise_phi(vec![(0.0, 0.0), (1.0, 0.0), (2.0, 1.0)]).is_err());
        // single knot
        assert!(OrliczSpec::piecewise_phi(vec![(0.0, 0.0)]).is_err());
    }

    #[test]
    fn piecewise_kind_from_final_slope() {
        let saturating =
            OrliczSpec::piecewise_phi(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)]).unwrap();
        assert_eq!(saturating.kind(), OrliczKind::NInfinityFunction);
        let growing = OrliczSpec::piecewise_phi(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)]).unwrap();
        assert_eq!(growing.kind(), OrliczKind::NFunction);
    }

    #[test]
    fn piecewise_primitive_matches_trapezoids() {
        let spec = OrliczSpec::piecewise_phi(vec![(0.0, 0.0), (1.0, 0.5), (2.0, 0.5)]).unwrap();
        // Quadratic ramp: Phi(1) = 0.25, then linear with slope 0.5.
        assert_relative_eq!(spec.big_phi(1.0).unwrap(), 0.25, max_relative = 1e-15);
        assert_relative_eq!(spec.big_phi(2.0).unwrap(), 0.75, max_relative = 1e-15);
        assert_relative_eq!(spec.big_phi(4.0).unwrap(), 1.75, max_relative = 1e-15);
        // Inside first segment: Phi(x) = x * (x/2) / 2 = x^2/4.
        assert_relative_eq!(spec.big_phi(0.5).unwrap(), 0.0625, max_relative = 1e-15);
        assert_eq!(spec.phi(3.0).unwrap(), 0.5);
    }

    #[test]
    fn delta2_power_is_exact() {
        let spec = OrliczSpec::power(2.0).unwrap();
        let report = spec.delta2_estimate(1e-6, 1e6, 500).unwrap();
        assert!((report.sup_ratio - 4.0).abs() <= 1e-9, "{}", report.sup_ratio);
        assert!(report.satisfied);
        assert!(report.violating_x.is_none());
    }

    #[test]
    fn delta2_log_shifted_bounded_by_four() {
        let spec = OrliczSpec::log_shifted();
        let report = spec.delta2_estimate(1e-8, 1e8, 1000).unwrap();
        assert!(report.sup_ratio <= 4.0 + 1e-9, "{}", report.sup_ratio);
        assert!(report.sup_ratio > 3.999_999, "{}", report.sup_ratio);
        assert!(report.satisfied);
    }

    #[test]
    fn delta2_exponential_explodes() {
        let spec = OrliczSpec::exponential().with_delta2_constant(1e6).unwrap();
        let report = spec.delta2_estimate(1e-3, 50.0, 400).unwrap();
        assert!(report.sup_ratio > 1e6);
        assert!(!report.satisfied);
        assert!(report.violating_x.is_some());
    }

    #[test]
    fn modular_examples() {
        let grid = CellGrid::uniform(0.0, 1.0, 1).unwrap();
        let spec = OrliczSpec::power(2.0).unwrap();
        assert_eq!(spec.modular(&grid, &StepFunction::new(vec![0.0])).unwrap(), 0.0);
        assert_eq!(spec.modular(&grid, &StepFunction::new(vec![1.0])).unwrap(), 0.5);

        let grid2 = CellGrid::uniform(0.0, 2.0, 2).unwrap();
        let logs = OrliczSpec::log_shifted();
        let m = logs.modular(&grid2, &StepFunction::new(vec![1.0, 3.0])).unwrap();
        // 1·(1−ln2) + 1·(3−ln4) = 4 − 3·ln2
        assert_relative_eq!(m, 1.920558458320164, max_relative = 1e-14);
    }

    #[test]
    fn modular_shape_mismatch() {
        let grid = CellGrid::uniform(0.0, 1.0, 2).unwrap();
        let spec = OrliczSpec::power(2.0).unwrap();
        assert!(matches!(
            spec.modular(&grid, &StepFunction::new(vec![1.0])),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn luxemburg_norm_examples() {
        let spec = OrliczSpec::power(2.0).unwrap();
        let grid = CellGrid::uniform(0.0, 1.0, 1).unwrap();
        assert_eq!(
            spec.luxemburg_norm(&grid, &StepFunction::new(vec![0.0]), 1e-10).unwrap(),
            0.0
        );
        let norm = spec
            .luxemburg_norm(&grid, &StepFunction::new(vec![2f64.sqrt()]), 1e-12)
            .unwrap();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-10);

        // f(x) = x on [0,1], 4096 midpoint samples: norm -> 1/sqrt(6).
        let grid = CellGrid::uniform(0.0, 1.0, 4096).unwrap();
        let f = StepFunction::from_fn(&grid, |x| x);
        let norm = spec.luxemburg_norm(&grid, &f, 1e-10).unwrap();
        assert!((norm - 0.40824829046386296).abs() < 1e-4, "{norm}");
    }

    #[test]
    fn luxemburg_norm_rejects_bad_tol() {
        let spec = OrliczSpec::power(2.0).unwrap();
        let grid = CellGrid::uniform(0.0, 1.0, 1).unwrap();
        assert!(spec.luxemburg_norm(&grid, &StepFunction::new(vec![1.0]), 0.0).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = OrliczSpec::power(2.0).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"family":"power","p":2.0}"#);
        let back: OrliczSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);

        let spec = OrliczSpec::piecewise_phi(vec![(0.0, 0.0), (1.0, 0.5)]).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"family":"piecewise_phi","knots":[[0.0,0.0],[1.0,0.5]]}"#);
        let back: OrliczSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);

        for (spec, tag) in [
            (OrliczSpec::log_shifted(), r#"{"family":"log_shifted"}"#),
            (OrliczSpec::arctan_primitive(), r#"{"family":"arctan"}"#),
            (OrliczSpec::exp_saturating(), r#"{"family":"exp_saturating"}"#),
            (OrliczSpec::exponential(), r#"{"family":"exponential"}"#),
        ] {
            assert_eq!(serde_json::to_string(&spec).unwrap(), tag);
        }
        // Invalid spec must fail to deserialize, not silently construct.
        assert!(serde_json::from_str::<OrliczSpec>(r#"{"family":"power","p":1.0}"#).is_err());
    }
}
