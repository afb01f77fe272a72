//! Output records and the `verify` suite.

use serde::Serialize;

use wcs_core::dro::{Decision, FrontierPoint};
use wcs_core::oracle::{brute_force_wc, deviation_axioms, random_scenario, OracleSet, SearchMode};
use wcs_core::riskstats::{c_alpha_n, cvar_deviation, range, std_dev};
use wcs_core::rng::SplitMix64;
use wcs_core::sensitivity::{budgeted_sensitivity, sensitivity};
use wcs_core::worstcase::{budgeted_eps_max, wc_box, wc_budgeted, wc_combination, wc_tv, BoxParams};
use wcs_core::{CvarLevel, DualCertificate, Phi, PhiFunction, SensitivityReport, UncertaintyFamily, WorstCaseResult};

#[derive(Serialize)]
pub struct Sensitivity {
    pub value: f64,
    pub family: &'static str,
    pub growth: &'static str,
}

impl From<&SensitivityReport> for Sensitivity {
    fn from(r: &SensitivityReport) -> Self {
        Self { value: r.value, family: r.family.label(), growth: r.growth.label() }
    }
}

/// Infinite radii are written as `null`.
#[derive(Serialize)]
pub struct WorstCase {
    pub epsilon: f64,
    pub value: f64,
    pub q: Vec<f64>,
    pub dual: DualCertificate,
    pub degenerate: bool,
    pub clamped: bool,
}

impl From<&WorstCaseResult> for WorstCase {
    fn from(w: &WorstCaseResult) -> Self {
        Self {
            epsilon: w.epsilon,
            value: w.value,
            q: w.worst_q.clone(),
            dual: w.dual,
            degenerate: w.degenerate,
            clamped: w.clamped,
        }
    }
}

#[derive(Serialize)]
pub struct Newsvendor {
    pub order: f64,
    pub saa_order: f64,
    pub critical_fractile: f64,
    pub nominal_mean: f64,
    pub worst_case: WorstCase,
}

#[derive(Serialize)]
pub struct Logreg<'a> {
    pub weights: &'a [f64],
    pub objective: f64,
    pub zero: bool,
    pub iterations: usize,
    pub sensitivity: Sensitivity,
}

pub fn frontier_csv(points: &[FrontierPoint]) -> String {
    let mut out = String::from("eps,decision,nominal_mean,sensitivity\n");
    for p in points {
        let decision = match &p.decision {
            Decision::Order(x) => x.to_string(),
            Decision::Weights(w) => w.iter().map(f64::to_string).collect::<Vec<_>>().join(";"),
        };
        out.push_str(&format!("{},{},{},{}\n", p.eps, decision, p.nominal_mean, p.sensitivity));
    }
    out
}

#[derive(Serialize)]
pub struct AxiomLine {
    pub measure: String,
    pub nonnegativity: bool,
    pub zero_iff_constant: bool,
    pub homogeneity_degree: Option<u8>,
    pub translation: bool,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct OracleLine {
    pub family: &'static str,
    pub max_gap: f64,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct BoundLine {
    pub bound: &'static str,
    pub violations: usize,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub axioms: Vec<AxiomLine>,
    pub worst_case: Vec<OracleLine>,
    pub bounds: Vec<BoundLine>,
    pub passed: bool,
}

pub fn verify(trials: usize, seed: u64) -> VerifyReport {
    let families = [
        (UncertaintyFamily::SmoothPhi { phi: Phi::ModifiedChi2 }, 1),
        (UncertaintyFamily::SmoothPhi { phi: Phi::Kl }, 1),
        (UncertaintyFamily::PenaltyPhi { phi: Phi::ModifiedChi2 }, 2),
        (UncertaintyFamily::PenaltyPhi { phi: Phi::Kl }, 2),
        (UncertaintyFamily::TotalVariation, 1),
        (UncertaintyFamily::Budgeted, 1),
        (UncertaintyFamily::Combination { alpha: 0.9 }, 1),
        (UncertaintyFamily::SymmetricBox, 1),
    ];
    let axioms: Vec<AxiomLine> = families
        .iter()
        .map(|&(f, want)| {
            let r = deviation_axioms(|s| sensitivity(s, f).map(|r| r.value).unwrap_or(f64::NAN), trials, seed);
            let degree = match (r.homogeneity.passed, r.quadratic_homogeneity.passed) {
                (true, _) => Some(1),
                (false, true) => Some(2),
                _ => None,
            };
            let passed = r.nonnegativity.passed && r.zero_iff_constant.passed && r.translation.passed && degree == Some(want);
            AxiomLine {
                measure: match f {
                    UncertaintyFamily::SmoothPhi { phi } | UncertaintyFamily::PenaltyPhi { phi } => {
                        format!("{}:{}", f.label(), phi.name())
                    }
                    _ => f.label().to_string(),
                },
                nonnegativity: r.nonnegativity.passed,
                zero_iff_constant: r.zero_iff_constant.passed,
                homogeneity_degree: degree,
                translation: r.translation.passed,
                passed,
            }
        })
        .collect();

    let mut rng = SplitMix64::new(seed);
    let mut gaps = [0.0f64; 4];
    for _ in 0..trials {
        let s = random_scenario(&mut rng, (2, 5), false);
        let eps_tv = 2.0 * rng.next_f64();
        let eps_b = budgeted_eps_max(&s) * rng.next_f64();
        let alpha = 0.05 + 0.9 * rng.next_f64();
        let eps_c = rng.next_f64();
        let (lo, hi) = (rng.next_f64(), 1.0 + 4.0 * rng.next_f64());
        let level = CvarLevel::new(alpha).expect("alpha in [0.05, 0.95]");
        let pairs = [
            (wc_tv(&s, eps_tv).map(|w| w.value), OracleSet::TotalVariation { eps: eps_tv }),
            (wc_budgeted(&s, eps_b).map(|w| w.value), OracleSet::Budgeted { eps: eps_b }),
            (wc_combination(&s, level, eps_c).map(|w| w.value), OracleSet::Combination { alpha, eps: eps_c }),
            (
                BoxParams::new(lo, hi).and_then(|b| wc_box(&s, b)).map(|w| w.value),
                OracleSet::Box { lower: lo, upper: hi },
            ),
        ];
        for (k, (value, set)) in pairs.into_iter().enumerate() {
            let gap = match (value, brute_force_wc(&s, set, SearchMode::Vertex)) {
                (Ok(v), Ok(o)) => (v - o).abs(),
                _ => f64::INFINITY,
            };
            gaps[k] = gaps[k].max(gap);
        }
    }
    let worst_case: Vec<OracleLine> = ["tv", "budgeted", "combo", "box"]
        .into_iter()
        .zip(gaps)
        .map(|(family, max_gap)| OracleLine { family, max_gap, passed: max_gap <= 1e-10 })
        .collect();

    let mut violations = [0usize; 3];
    for _ in 0..trials {
        let s = random_scenario(&mut rng, (3, 12), true);
        let sd = std_dev(&s);
        if sd > range(&s) / 2.0 + 1e-12 {
            violations[0] += 1;
        }
        let level = CvarLevel::new(0.9).expect("valid level");
        if let Ok(c) = c_alpha_n(s.len(), level) {
            if cvar_deviation(&s, level) > c * sd * (1.0 + 1e-12) {
                violations[1] += 1;
            }
        }
        if budgeted_sensitivity(&s).value >= ((s.len() - 1) as f64).sqrt() * sd {
            violations[2] += 1;
        }
    }
    let bounds: Vec<BoundLine> = ["sd <= range/2", "cvar deviation <= C(alpha,n) sd", "E - min < sqrt(n-1) sd"]
        .into_iter()
        .zip(violations)
        .map(|(bound, v)| BoundLine { bound, violations: v, passed: v == 0 })
        .collect();

    let passed = axioms.iter().all(|a| a.passed) && worst_case.iter().all(|w| w.passed) && bounds.iter().all(|b| b.passed);
    VerifyReport { seed, trials, axioms, worst_case, bounds, passed }
}
