//! Shared data model: nominal scenarios, uncertainty-family descriptors and
//! the result records produced by the worst-case and sensitivity routines.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::ksum;
use crate::phi::Phi;

const PROB_SUM_TOL: f64 = 1e-12;

/// A discrete nominal model: cost `costs[i]` occurs with probability `probs[i]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    costs: Vec<f64>,
    probs: Vec<f64>,
}

impl Scenario {
    /// Validates a cost vector and optional probability vector.
    ///
    /// Missing probabilities mean the uniform distribution. Zero or negative
    /// probabilities are rejected, and so are sums off by more than 1e-12;
    /// nothing is renormalised.
    pub fn new(costs: Vec<f64>, probs: Option<Vec<f64>>) -> Result<Self> {
        if costs.is_empty() {
            return Err(Error::EmptyInput("cost vector has no entries".into()));
        }
        if let Some((index, &value)) = costs.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFiniteCost { index, value });
        }
        let n = costs.len();
        let probs = match probs {
            None => vec![1.0 / n as f64; n],
            Some(p) => {
                if p.len() != n {
                    return Err(Error::LengthMismatch { costs: n, probs: p.len() });
                }
                if let Some((index, &value)) = p.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
                    return Err(Error::NonPositiveProbability { index, value });
                }
                let sum = ksum(p.iter().copied());
                if !sum.is_finite() || (sum - 1.0).abs() > PROB_SUM_TOL {
                    return Err(Error::ProbSumMismatch { sum });
                }
                p
            }
        };
        Ok(Self { costs, probs })
    }

    pub fn uniform(costs: Vec<f64>) -> Result<Self> {
        Self::new(costs, None)
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn min_cost(&self) -> f64 {
        self.costs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_cost(&self) -> f64 {
        self.costs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_prob(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_constant(&self) -> bool {
        let first = self.costs[0];
        self.costs.iter().all(|&c| c == first)
    }

    /// True when every probability equals 1/n up to rounding.
    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.len() as f64;
        self.probs.iter().all(|&p| (p - u).abs() <= 1e-12)
    }

    pub fn sorted_desc(&self) -> SortedScenario {
        SortedScenario::from_scenario(self)
    }

    /// Same probabilities, new costs.
    pub fn with_costs(&self, costs: Vec<f64>) -> Result<Self> {
        Self::new(costs, Some(self.probs.clone()))
    }
}

/// Costs sorted from largest to smallest, with their probabilities and the
/// permutation back to the original indices.
///
/// Ties keep their original relative order, so `order` is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedScenario {
    /// `order[rank]` is the original index of the rank-th largest cost.
    pub order: Vec<usize>,
    pub costs_desc: Vec<f64>,
    pub probs_desc: Vec<f64>,
}

impl SortedScenario {
    pub fn from_scenario(s: &Scenario) -> Self {
        let mut order: Vec<usize> = (0..s.len()).collect();
        order.sort_by(|&a, &b| s.costs[b].total_cmp(&s.costs[a]));
        let costs_desc = order.iter().map(|&i| s.costs[i]).collect();
        let probs_desc = order.iter().map(|&i| s.probs[i]).collect();
        Self { order, costs_desc, probs_desc }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Maps a vector indexed by rank back to original index order.
    pub fn unsort(&self, by_rank: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; by_rank.len()];
        for (rank, &idx) in self.order.iter().enumerate() {
            out[idx] = by_rank[rank];
        }
        out
    }
}

/// Rate at which the worst-case value departs from the nominal mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Growth {
    Linear,
    Sqrt,
}

impl Growth {
    pub fn apply(self, eps: f64) -> f64 {
        match self {
            Growth::Linear => eps,
            Growth::Sqrt => eps.sqrt(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Growth::Linear => "linear",
            Growth::Sqrt => "sqrt",
        }
    }
}

/// CVaR level `alpha` in `[0, 1)`, kept together with the cap surplus
/// `alpha / (1 - alpha)` so that levels built from a budget carry it exactly.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CvarLevel {
    alpha: f64,
    surplus: f64,
}

impl Serialize for CvarLevel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.alpha)
    }
}

impl CvarLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if (0.0..1.0).contains(&alpha) {
            Ok(Self { alpha, surplus: alpha / (1.0 - alpha) })
        } else {
            Err(Error::InvalidParameter(format!("CVaR level alpha = {alpha} must lie in [0, 1)")))
        }
    }

    /// Level `eps / (1 + eps)` of the budget `eps`, with caps `(1 + eps) p`.
    pub fn from_budget(eps: f64) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::EpsOutOfRange { eps, lo: 0.0, hi: f64::INFINITY });
        }
        Ok(Self { alpha: eps / (1.0 + eps), surplus: eps })
    }

    pub fn value(self) -> f64 {
        self.alpha
    }

    /// Per-atom likelihood-ratio cap `1/(1-alpha)` of the dual CVaR program.
    pub fn cap_factor(self) -> f64 {
        1.0 + self.surplus
    }

    /// `cap_factor - 1`.
    pub fn cap_surplus(self) -> f64 {
        self.surplus
    }
}

/// One ambiguity-set family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum UncertaintyFamily {
    /// Ball in a smooth φ-divergence.
    SmoothPhi { phi: Phi },
    /// Penalised φ-divergence: the ambiguity parameter is the inverse penalty.
    PenaltyPhi { phi: Phi },
    TotalVariation,
    /// Likelihood-ratio cap `q <= (1 + eps) p`.
    Budgeted,
    /// `(1 - eps) p + eps * Q_CVaR(alpha)`.
    Combination { alpha: f64 },
    /// `p / (1 + nu) <= q <= (1 + nu) p`.
    SymmetricBox,
    /// Type-1 Wasserstein ball; the cost model is supplied separately.
    WassersteinL1,
}

impl UncertaintyFamily {
    pub fn growth(&self) -> Growth {
        match self {
            UncertaintyFamily::SmoothPhi { .. } => Growth::Sqrt,
            _ => Growth::Linear,
        }
    }

    /// Short name used on the command line and in output files.
    pub fn label(&self) -> &'static str {
        match self {
            UncertaintyFamily::SmoothPhi { .. } => "phi",
            UncertaintyFamily::PenaltyPhi { .. } => "penalty-phi",
            UncertaintyFamily::TotalVariation => "tv",
            UncertaintyFamily::Budgeted => "budgeted",
            UncertaintyFamily::Combination { .. } => "combo",
            UncertaintyFamily::SymmetricBox => "box",
            UncertaintyFamily::WassersteinL1 => "wasserstein",
        }
    }
}

/// Family-specific dual information attached to a worst-case solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DualCertificate {
    None,
    /// Inverse multiplier `delta` of the divergence constraint and shift `c`
    /// of the normalisation constraint.
    SmoothPhi { delta: f64, c: f64 },
    /// Small-radius LP dual: `V = E + eps * max|f - theta|`, `lambda = range / 2`.
    TotalVariation { theta: f64, lambda: f64 },
    /// Right slope of the current linear piece of `V_b`.
    Budgeted { slope: f64 },
    /// Least dual multiplier at radius zero and the radius up to which
    /// `V = E + eps * lambda` holds exactly.
    Wasserstein { lambda: f64, exact_radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCaseResult {
    pub epsilon: f64,
    pub value: f64,
    /// Worst-case distribution in the scenario's original index order.
    pub worst_q: Vec<f64>,
    pub dual: DualCertificate,
    /// Costs were constant; `V = E` and `q = p` for every radius.
    pub degenerate: bool,
    /// The requested radius exceeded the family's meaningful range and was clamped.
    pub clamped: bool,
}

impl WorstCaseResult {
    pub(crate) fn nominal(s: &Scenario, eps: f64, degenerate: bool) -> Self {
        Self {
            epsilon: eps,
            value: crate::riskstats::mean(s),
            worst_q: s.probs().to_vec(),
            dual: DualCertificate::None,
            degenerate,
            clamped: false,
        }
    }

    /// Builds a result from a candidate distribution: tiny negative entries
    /// are zeroed and the value is recomputed as `q . f`.
    pub(crate) fn from_q(s: &Scenario, eps: f64, mut q: Vec<f64>, dual: DualCertificate) -> Self {
        for v in q.iter_mut() {
            if *v < 0.0 && *v >= -1e-12 {
                *v = 0.0;
            }
        }
        let value = expectation(s, &q);
        Self { epsilon: eps, value, worst_q: q, dual, degenerate: false, clamped: false }
    }
}

/// `q . f` anchored at `min(f)` so constant costs come back exactly.
pub(crate) fn expectation(s: &Scenario, q: &[f64]) -> f64 {
    let lo = s.min_cost();
    lo + ksum(q.iter().zip(s.costs()).map(|(qi, fi)| qi * (fi - lo)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub value: f64,
    pub family: UncertaintyFamily,
    pub growth: Growth,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_default() {
        let s = Scenario::new(vec![1.0, 5.0, 3.0], None).unwrap();
        assert_eq!(s.probs(), &[1.0 / 3.0; 3]);
    }

    #[test]
    fn explicit_probs_accepted() {
        let s = Scenario::new(vec![0.0, 10.0], Some(vec![0.5, 0.5])).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn rejects_zero_probability() {
        let e = Scenario::new(vec![0.0, 10.0], Some(vec![1.0, 0.0])).unwrap_err();
        assert_eq!(e.code(), "NonPositiveProbability");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(Scenario::new(vec![], None).unwrap_err().code(), "EmptyInput");
        assert_eq!(Scenario::new(vec![f64::NAN], None).unwrap_err().code(), "NonFiniteCost");
        assert_eq!(Scenario::new(vec![1.0, f64::INFINITY], None).unwrap_err().code(), "NonFiniteCost");
        assert_eq!(
            Scenario::new(vec![1.0, 2.0], Some(vec![0.5, 0.6])).unwrap_err().code(),
            "ProbSumMismatch"
        );
        assert_eq!(
            Scenario::new(vec![1.0, 2.0], Some(vec![1.0])).unwrap_err().code(),
            "LengthMismatch"
        );
        assert_eq!(
            Scenario::new(vec![1.0, 2.0], Some(vec![f64::NAN, 1.0])).unwrap_err().code(),
            "NonPositiveProbability"
        );
    }

    #[test]
    fn sort_examples() {
        let s = Scenario::uniform(vec![1.0, 5.0, 3.0]).unwrap().sorted_desc();
        assert_eq!(s.costs_desc, vec![5.0, 3.0, 1.0]);
        assert_eq!(s.order, vec![1, 2, 0]);

        let t = Scenario::uniform(vec![7.0, 7.0]).unwrap().sorted_desc();
        assert_eq!(t.costs_desc, vec![7.0, 7.0]);
        assert_eq!(t.order, vec![0, 1]);

        let u = Scenario::new(vec![0.0, 10.0], Some(vec![0.5, 0.5])).unwrap().sorted_desc();
        assert_eq!(u.costs_desc, vec![10.0, 0.0]);
        assert_eq!(u.probs_desc, vec![0.5, 0.5]);
    }

    #[test]
    fn growth_rates() {
        assert_eq!(UncertaintyFamily::SmoothPhi { phi: Phi::Kl }.growth(), Growth::Sqrt);
        assert_eq!(UncertaintyFamily::Budgeted.growth(), Growth::Linear);
        assert_eq!(UncertaintyFamily::WassersteinL1.growth(), Growth::Linear);
        assert_eq!(Growth::Sqrt.apply(0.04), 0.2);
    }
}
