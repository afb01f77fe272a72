//! Continuous piecewise-linear functions of a scalar outcome on an interval.

use serde::Serialize;

use crate::error::{Error, Result};

/// Continuous piecewise-linear `z ↦ f(z)` on `[domain.0, domain.1]`.
///
/// `slopes[k]` applies left of `breakpoints[k]` and `slopes.last()` right of
/// the final breakpoint. The function is pinned by its value at the first
/// breakpoint (or at `z = 0` when there are none).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseLinearCost {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    knot_values: Vec<f64>,
    anchor: f64,
    domain: (f64, f64),
}

impl PiecewiseLinearCost {
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, anchor: f64, domain: (f64, f64)) -> Result<Self> {
        if slopes.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "{} breakpoints need {} slopes, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                slopes.len()
            )));
        }
        if slopes.iter().any(|s| !s.is_finite()) || breakpoints.iter().any(|b| !b.is_finite()) || !anchor.is_finite() {
            return Err(Error::InvalidParameter("slopes, breakpoints and anchor must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("breakpoints must be strictly increasing".into()));
        }
        if !(domain.0 < domain.1) || domain.0.is_nan() || domain.1.is_nan() {
            return Err(Error::InvalidParameter("empty domain".into()));
        }
        let mut knot_values = Vec::with_capacity(breakpoints.len());
        if let Some(&b0) = breakpoints.first() {
            knot_values.push(anchor);
            let mut prev = (b0, anchor);
            for (k, &b) in breakpoints.iter().enumerate().skip(1) {
                let v = prev.1 + slopes[k] * (b - prev.0);
                knot_values.push(v);
                prev = (b, v);
            }
        }
        Ok(Self { breakpoints, slopes, knot_values, anchor, domain })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Index of the linear piece containing `z` (right-continuous).
    fn piece(&self, z: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= z)
    }

    pub fn eval(&self, z: f64) -> f64 {
        if self.breakpoints.is_empty() {
            return self.anchor + self.slopes[0] * z;
        }
        let k = self.piece(z);
        if k == 0 {
            self.knot_values[0] + self.slopes[0] * (z - self.breakpoints[0])
        } else {
            self.knot_values[k - 1] + self.slopes[k] * (z - self.breakpoints[k - 1])
        }
    }

    /// Slope immediately right of `z`.
    pub fn right_slope(&self, z: f64) -> f64 {
        self.slopes[self.piece(z)]
    }

    /// Slope immediately left of `z`.
    pub fn left_slope(&self, z: f64) -> f64 {
        self.slopes[self.breakpoints.partition_point(|&b| b < z)]
    }

    /// Points where `sup_z (f(z) - f(y)) / |z - y|` can be attained: the
    /// breakpoints and finite domain ends.
    pub(crate) fn candidate_points(&self) -> impl Iterator<Item = f64> + '_ {
        let (lo, hi) = self.domain;
        self.breakpoints
            .iter()
            .copied()
            .filter(move |&b| b >= lo && b <= hi)
            .chain([lo, hi].into_iter().filter(|v| v.is_finite()))
    }

    /// Supremum of `(f(z) - f(y)) / |z - y|` over `z` in the domain,
    /// together with the largest transport distance at which it is attained
    /// (`+inf` when only approached asymptotically).
    pub fn sup_ratio_with_reach(&self, y: f64) -> (f64, f64) {
        let (lo, hi) = self.domain;
        let fy = self.eval(y);
        let mut best = f64::NEG_INFINITY;
        let mut reach = 0.0;
        let mut consider = |ratio: f64, dist: f64| {
            if best == f64::NEG_INFINITY || ratio > best + 1e-12 * best.abs().max(1.0) {
                best = ratio;
                reach = dist;
            } else if (ratio - best).abs() <= 1e-12 * best.abs().max(1.0) && dist > reach {
                reach = dist;
            }
        };
        if y < hi {
            consider(self.right_slope(y), 0.0);
        }
        if y > lo {
            consider(-self.left_slope(y), 0.0);
        }
        if hi == f64::INFINITY {
            consider(*self.slopes.last().unwrap(), f64::INFINITY);
        }
        if lo == f64::NEG_INFINITY {
            consider(-self.slopes[0], f64::INFINITY);
        }
        for z in self.candidate_points() {
            if z != y {
                let d = (z - y).abs();
                consider((self.eval(z) - fy) / d, d);
            }
        }
        (best, reach)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_and_is_continuous() {
        let f = PiecewiseLinearCost::new(vec![0.0, 2.0], vec![-1.0, 1.0, 3.0], 5.0, (f64::NEG_INFINITY, f64::INFINITY)).unwrap();
        assert_eq!(f.eval(0.0), 5.0);
        assert_eq!(f.eval(-2.0), 7.0);
        assert_eq!(f.eval(2.0), 7.0);
        assert_eq!(f.eval(3.0), 10.0);
        assert!((f.eval(2.0 - 1e-12) - 7.0).abs() < 1e-10);
    }

    #[test]
    fn ratio_on_v_shape() {
        // |z - 1| on [0, inf): from y = 1 the best ratio is 1 in either direction.
        let f = PiecewiseLinearCost::new(vec![1.0], vec![-1.0, 1.0], 0.0, (0.0, f64::INFINITY)).unwrap();
        let (r, reach) = f.sup_ratio_with_reach(1.0);
        assert_eq!(r, 1.0);
        assert_eq!(reach, f64::INFINITY);
        // from y = 3 moving right gains slope 1; moving to z = 0 gains (1 - 2) / 3 < 0.
        assert_eq!(f.sup_ratio_with_reach(3.0).0, 1.0);
    }

    #[test]
    fn rejects_malformed() {
        assert!(PiecewiseLinearCost::new(vec![1.0], vec![1.0], 0.0, (0.0, 1.0)).is_err());
        assert!(PiecewiseLinearCost::new(vec![2.0, 1.0], vec![1.0, 1.0, 1.0], 0.0, (0.0, 9.0)).is_err());
    }
}
