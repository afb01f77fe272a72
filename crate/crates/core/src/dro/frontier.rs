use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Scenario, SensitivityReport, UncertaintyFamily};
use crate::riskstats;
use crate::sensitivity::{sensitivity, wasserstein_sensitivity};

use super::data::LabeledDataset;
use super::logreg::{log_loss, logreg_wasserstein};
use super::newsvendor::{cost_scenario, dro_newsvendor, NewsvendorParams};

/// What a frontier sweep solves.
#[derive(Debug, Clone, Copy)]
pub enum FrontierProblem<'a> {
    Newsvendor { params: &'a NewsvendorParams, demand: &'a Scenario },
    /// Only the Wasserstein family has a solver for this problem.
    Logreg { data: &'a LabeledDataset, tol: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Decision {
    Order(f64),
    Weights(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub eps: f64,
    pub decision: Decision,
    pub nominal_mean: f64,
    pub sensitivity: f64,
}

/// Solves the robust problem for each radius in `eps_list` (nonnegative,
/// ascending) and scores the decision by its nominal mean cost and the
/// sensitivity of the `measure` family. Points come back in input order.
pub fn frontier(
    problem: FrontierProblem<'_>,
    family: UncertaintyFamily,
    eps_list: &[f64],
    measure: UncertaintyFamily,
) -> Result<Vec<FrontierPoint>> {
    if eps_list.iter().any(|&e| !(e >= 0.0) || !e.is_finite()) || eps_list.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("eps list must be nonnegative and ascending".into()));
    }
    eps_list
        .iter()
        .map(|&eps| match problem {
            FrontierProblem::Newsvendor { params, demand } => {
                let sol = dro_newsvendor(params, demand, family, eps)?;
                let costs = cost_scenario(params, demand, sol.order);
                let sens = match measure {
                    UncertaintyFamily::WassersteinL1 => {
                        wasserstein_sensitivity(demand.costs(), demand.probs(), &params.cost_in_demand(sol.order)?)?
                    }
                    m => sensitivity(&costs, m)?,
                };
                Ok(FrontierPoint {
                    eps,
                    decision: Decision::Order(sol.order),
                    nominal_mean: riskstats::mean(&costs),
                    sensitivity: sens.value,
                })
            }
            FrontierProblem::Logreg { data, tol } => {
                if family != UncertaintyFamily::WassersteinL1 {
                    return Err(Error::InvalidParameter(format!(
                        "logistic regression is solved for the wasserstein family only, got {}",
                        family.label()
                    )));
                }
                let fit = logreg_wasserstein(data, eps, tol)?;
                let sens = logreg_measure(data, &fit.weights, measure)?;
                Ok(FrontierPoint {
                    eps,
                    nominal_mean: log_loss(data, &fit.weights),
                    sensitivity: sens.value,
                    decision: Decision::Weights(fit.weights),
                })
            }
        })
        .collect()
}

/// Sensitivity of the in-sample loss distribution at `w`; for the
/// Wasserstein family it is the Lipschitz constant `||w||_2` of the loss in
/// the features.
fn logreg_measure(data: &LabeledDataset, w: &[f64], measure: UncertaintyFamily) -> Result<SensitivityReport> {
    match measure {
        UncertaintyFamily::WassersteinL1 => Ok(SensitivityReport {
            value: w.iter().map(|v| v * v).sum::<f64>().sqrt(),
            family: measure,
            growth: measure.growth(),
        }),
        m => {
            let losses = data
                .features()
                .iter()
                .zip(data.labels())
                .map(|(x, y)| {
                    let single = LabeledDataset::new(vec![x.clone()], vec![*y]).expect("row of a valid dataset");
                    log_loss(&single, w)
                })
                .collect();
            sensitivity(&Scenario::uniform(losses)?, m)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_atom_budgeted_frontier() {
        let params = NewsvendorParams::new(10.0, 2.0, 0.0, 4.0).unwrap();
        let demand = Scenario::uniform(vec![10.0, 20.0]).unwrap();
        let pts = frontier(
            FrontierProblem::Newsvendor { params: &params, demand: &demand },
            UncertaintyFamily::Budgeted,
            &[0.0, 1.0],
            UncertaintyFamily::Budgeted,
        )
        .unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].nominal_mean, -110.0);
        assert_eq!(pts[0].sensitivity, 50.0);
        assert!((pts[1].nominal_mean + 520.0 / 7.0).abs() < 1e-9);
        assert!(pts[1].sensitivity.abs() < 1e-9);
    }

    #[test]
    fn rejects_unsorted_eps() {
        let params = NewsvendorParams::new(10.0, 2.0, 0.0, 4.0).unwrap();
        let demand = Scenario::uniform(vec![10.0, 20.0]).unwrap();
        let p = FrontierProblem::Newsvendor { params: &params, demand: &demand };
        assert!(frontier(p, UncertaintyFamily::Budgeted, &[1.0, 0.0], UncertaintyFamily::Budgeted).is_err());
    }
}
