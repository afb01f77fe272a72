//! Decision-level problems: a single-item newsvendor and binary logistic
//! regression, their robust counterparts, frontier sweeps and seedable
//! synthetic data.

mod data;
mod frontier;
mod logreg;
mod newsvendor;

pub use data::{gen_mixture_demand, gen_synth_classification, LabeledDataset};
pub use frontier::{frontier, Decision, FrontierPoint, FrontierProblem};
pub use logreg::{
    log_loss, logreg_saa, logreg_wasserstein, wasserstein_logreg_objective, LogregFit, LogregWassersteinFit,
};
pub use newsvendor::{
    cost_scenario, dro_newsvendor, newsvendor_cost, newsvendor_worst_case, saa_newsvendor, NewsvendorParams,
    NewsvendorSolution,
};
