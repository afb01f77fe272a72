//! Closed-form worst-case sensitivities for every supported family.
//!
//! Each function returns the right derivative of the worst-case expected
//! cost at radius zero, measured against the family's growth rate.

use crate::error::{Error, Result};
use crate::model::{CvarLevel, Scenario, SensitivityReport, UncertaintyFamily};
use crate::phi::{Phi, PhiFunction};
use crate::plcost::PiecewiseLinearCost;
use crate::riskstats;

fn report(value: f64, family: UncertaintyFamily) -> SensitivityReport {
    SensitivityReport { value, family, growth: family.growth() }
}

/// `sqrt(2 Var_p(f) / φ''(1))`, growth `sqrt(eps)`.
pub fn smooth_phi_sensitivity(s: &Scenario, phi: Phi) -> SensitivityReport {
    let v = (2.0 * riskstats::variance(s) / phi.curvature_at_one()).sqrt();
    report(v, UncertaintyFamily::SmoothPhi { phi })
}

/// `Var_p(f) / φ''(1)` for the penalised formulation; homogeneous of degree two.
pub fn penalty_phi_sensitivity(s: &Scenario, phi: Phi) -> SensitivityReport {
    let v = riskstats::variance(s) / phi.curvature_at_one();
    report(v, UncertaintyFamily::PenaltyPhi { phi })
}

/// Half the range of the costs.
pub fn tv_sensitivity(s: &Scenario) -> SensitivityReport {
    report(0.5 * riskstats::range(s), UncertaintyFamily::TotalVariation)
}

/// `E_p(f) - min(f)`: the spread of the favourable side.
pub fn budgeted_sensitivity(s: &Scenario) -> SensitivityReport {
    report(riskstats::mean_excess(s), UncertaintyFamily::Budgeted)
}

/// CVaR deviation at level `alpha`.
pub fn combination_sensitivity(s: &Scenario, alpha: CvarLevel) -> SensitivityReport {
    report(
        riskstats::cvar_deviation(s, alpha),
        UncertaintyFamily::Combination { alpha: alpha.value() },
    )
}

/// `CVaR_{1/2}(f) - E_p(f)`: the limit of the symmetric box as `nu -> 0`.
pub fn symmetric_box_sensitivity(s: &Scenario) -> SensitivityReport {
    let half = CvarLevel::new(0.5).expect("0.5 is a valid level");
    report(riskstats::cvar_deviation(s, half), UncertaintyFamily::SymmetricBox)
}

/// Dispatch on the family. Wasserstein needs a cost model and is rejected
/// here; use [`wasserstein_sensitivity`].
pub fn sensitivity(s: &Scenario, family: UncertaintyFamily) -> Result<SensitivityReport> {
    Ok(match family {
        UncertaintyFamily::SmoothPhi { phi } => smooth_phi_sensitivity(s, phi),
        UncertaintyFamily::PenaltyPhi { phi } => penalty_phi_sensitivity(s, phi),
        UncertaintyFamily::TotalVariation => tv_sensitivity(s),
        UncertaintyFamily::Budgeted => budgeted_sensitivity(s),
        UncertaintyFamily::Combination { alpha } => combination_sensitivity(s, CvarLevel::new(alpha)?),
        UncertaintyFamily::SymmetricBox => symmetric_box_sensitivity(s),
        UncertaintyFamily::WassersteinL1 => {
            return Err(Error::InvalidParameter(
                "Wasserstein sensitivity needs a cost model over the support".into(),
            ))
        }
    })
}

/// Largest cost growth per unit of transport from a support point:
/// `sup_z (f(z) - f(y)) / ||z - y||`.
pub trait RatioOracle<P> {
    fn sup_ratio(&self, from: &P) -> f64;
}

impl RatioOracle<f64> for PiecewiseLinearCost {
    fn sup_ratio(&self, from: &f64) -> f64 {
        self.sup_ratio_with_reach(*from).0
    }
}

/// Ratio oracle for a concave differentiable cost: the dual norm of the
/// gradient at the support point.
pub struct ConcaveGradient<F> {
    gradient: F,
    /// Exponent of the dual norm (`q` with `1/p + 1/q = 1`).
    dual_exponent: f64,
}

impl<F: Fn(&[f64]) -> Vec<f64>> ConcaveGradient<F> {
    pub fn new(gradient: F, dual_exponent: f64) -> Result<Self> {
        if !(dual_exponent >= 1.0) {
            return Err(Error::InvalidParameter(format!("dual norm exponent {dual_exponent} < 1")));
        }
        Ok(Self { gradient, dual_exponent })
    }
}

pub(crate) fn lp_norm(v: &[f64], exponent: f64) -> f64 {
    if exponent == f64::INFINITY {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    } else if exponent == 1.0 {
        v.iter().map(|x| x.abs()).sum()
    } else {
        v.iter().map(|x| x.abs().powf(exponent)).sum::<f64>().powf(1.0 / exponent)
    }
}

impl<F: Fn(&[f64]) -> Vec<f64>> RatioOracle<Vec<f64>> for ConcaveGradient<F> {
    fn sup_ratio(&self, from: &Vec<f64>) -> f64 {
        lp_norm(&(self.gradient)(from), self.dual_exponent)
    }
}

/// Worst-case sensitivity of a type-1 Wasserstein ball around the empirical
/// distribution on `points`: the largest transport ratio over the support.
pub fn wasserstein_sensitivity<P, O: RatioOracle<P> + ?Sized>(
    points: &[P],
    probs: &[f64],
    oracle: &O,
) -> Result<SensitivityReport> {
    if points.is_empty() {
        return Err(Error::EmptyInput("no support points".into()));
    }
    if points.len() != probs.len() {
        return Err(Error::LengthMismatch { costs: points.len(), probs: probs.len() });
    }
    if let Some((index, &value)) = probs.iter().enumerate().find(|(_, p)| !(**p > 0.0)) {
        return Err(Error::NonPositiveProbability { index, value });
    }
    let mut best = 0.0f64;
    for (index, y) in points.iter().enumerate() {
        let r = oracle.sup_ratio(y);
        if r.is_nan() || r == f64::INFINITY {
            return Err(Error::UnboundedRatio { index });
        }
        best = best.max(r);
    }
    Ok(report(best, UncertaintyFamily::WassersteinL1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Growth;

    fn uni(c: &[f64]) -> Scenario {
        Scenario::uniform(c.to_vec()).unwrap()
    }

    #[test]
    fn smooth_phi_examples() {
        let s = uni(&[0.0, 10.0]);
        assert!((smooth_phi_sensitivity(&s, Phi::ModifiedChi2).value - 50f64.sqrt()).abs() < 1e-12);
        assert_eq!(smooth_phi_sensitivity(&uni(&[2.0; 3]), Phi::Kl).value, 0.0);
        assert_eq!(smooth_phi_sensitivity(&s, Phi::Kl).growth, Growth::Sqrt);
    }

    #[test]
    fn penalty_examples() {
        let s = uni(&[0.0, 10.0]);
        assert_eq!(penalty_phi_sensitivity(&s, Phi::ModifiedChi2).value, 25.0);
        let doubled = uni(&[0.0, 20.0]);
        let a = smooth_phi_sensitivity(&doubled, Phi::Kl).value / smooth_phi_sensitivity(&s, Phi::Kl).value;
        let b = penalty_phi_sensitivity(&doubled, Phi::Kl).value / penalty_phi_sensitivity(&s, Phi::Kl).value;
        assert!((a - 2.0).abs() < 1e-12);
        assert!((b - 4.0).abs() < 1e-12);
    }

    #[test]
    fn linear_family_examples() {
        assert_eq!(tv_sensitivity(&uni(&[1.0, 5.0, 3.0])).value, 2.0);
        assert_eq!(tv_sensitivity(&uni(&[0.0, 10.0])).value, 5.0);
        assert!((budgeted_sensitivity(&uni(&[1.0, 5.0, 3.0])).value - 2.0).abs() < 1e-14);
        assert_eq!(budgeted_sensitivity(&uni(&[0.0, 10.0])).value, 5.0);
        let half = CvarLevel::new(0.5).unwrap();
        assert_eq!(combination_sensitivity(&uni(&[0.0, 10.0]), half).value, 5.0);
        assert_eq!(symmetric_box_sensitivity(&uni(&[0.0, 10.0])).value, 5.0);
        // CVaR_{1/2} of (1,5,3): 2/3 on 5 and 1/3 on 3 gives 13/3.
        assert!((symmetric_box_sensitivity(&uni(&[1.0, 5.0, 3.0])).value - 4.0 / 3.0).abs() < 1e-14);
        for f in [tv_sensitivity, budgeted_sensitivity, symmetric_box_sensitivity] {
            assert_eq!(f(&uni(&[3.3; 4])).value, 0.0);
        }
    }

    #[test]
    fn combination_saturates_at_max() {
        let s = Scenario::new(vec![0.0, 4.0, 10.0], Some(vec![0.5, 0.3, 0.2])).unwrap();
        let a = CvarLevel::new(0.85).unwrap();
        assert!((combination_sensitivity(&s, a).value - (10.0 - riskstats::mean(&s))).abs() < 1e-13);
    }

    #[test]
    fn wasserstein_newsvendor_ratio() {
        // r = 10, c = 2, q = 0, s = 4 at x = 15.
        let x = 15.0;
        let f = PiecewiseLinearCost::new(vec![x], vec![-10.0, 4.0], -10.0 * x + 2.0 * x, (0.0, f64::INFINITY)).unwrap();
        let r = wasserstein_sensitivity(&[10.0, 20.0], &[0.5, 0.5], &f).unwrap();
        assert_eq!(r.value, 10.0);
    }

    #[test]
    fn wasserstein_concave_gradient() {
        let oracle = ConcaveGradient::new(|z: &[f64]| vec![-2.0 * z[0]], 2.0).unwrap();
        let r = wasserstein_sensitivity(&[vec![1.0], vec![-2.0]], &[0.5, 0.5], &oracle).unwrap();
        assert_eq!(r.value, 4.0);
        let flat = ConcaveGradient::new(|_: &[f64]| vec![0.0], 2.0).unwrap();
        assert_eq!(wasserstein_sensitivity(&[vec![1.0]], &[1.0], &flat).unwrap().value, 0.0);
    }

    #[test]
    fn wasserstein_unbounded_ratio_is_an_error() {
        let oracle = ConcaveGradient::new(|_: &[f64]| vec![f64::INFINITY], 2.0).unwrap();
        let e = wasserstein_sensitivity(&[vec![0.0]], &[1.0], &oracle).unwrap_err();
        assert_eq!(e.code(), "UnboundedRatio");
    }
}
