//! Worst-case sensitivity analysis for distributionally robust optimisation
//! over discrete nominal distributions.
//!
//! The crate computes worst-case expected costs `V(eps)` and worst-case
//! distributions for φ-divergence, total-variation, budgeted, CVaR-mixture,
//! likelihood-ratio-box and type-1 Wasserstein ambiguity sets; their
//! sensitivities `lim (V(eps) - E_p f) / g(eps)`; brute-force verifiers for
//! both; and mean-sensitivity solvers for a newsvendor and a logistic
//! regression model.

// Negated comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dro;
pub mod error;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod phi;
pub mod plcost;
pub mod riskstats;
pub mod rng;
pub mod sensitivity;
pub mod worstcase;

pub use error::{Error, Result};
pub use model::{
    CvarLevel, DualCertificate, Growth, Scenario, SensitivityReport, SortedScenario, UncertaintyFamily,
    WorstCaseResult,
};
pub use phi::{Phi, PhiFunction};
pub use plcost::PiecewiseLinearCost;
