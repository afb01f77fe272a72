//! Exact worst-case expected costs `V(eps)` and worst-case distributions
//! for each ambiguity family, with dual certificates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{expectation, CvarLevel, DualCertificate, Scenario, UncertaintyFamily, WorstCaseResult};
use crate::numeric::{ksum, solve_increasing};
use crate::phi::{divergence, Phi, PhiFunction};
use crate::plcost::PiecewiseLinearCost;
use crate::riskstats::{self, greedy_fill, mean_excess};

const ROOT_TOL: f64 = 1e-15;

fn check_eps(eps: f64, hi: f64) -> Result<()> {
    if !(eps >= 0.0) || (hi.is_finite() && eps > hi) {
        return Err(Error::EpsOutOfRange { eps, lo: 0.0, hi });
    }
    Ok(())
}

/// Modified χ² ball, `φ(z) = (z - 1)² / 2`.
///
/// Uses the closed form `q_i = p_i (1 + sqrt(2 eps / Var) (f_i - E))` while it
/// stays nonnegative and the exact dual solve otherwise.
pub fn wc_chi2(s: &Scenario, eps: f64) -> Result<WorstCaseResult> {
    check_eps(eps, f64::INFINITY)?;
    if s.is_constant() {
        return Ok(WorstCaseResult::nominal(s, eps, true));
    }
    if eps == 0.0 {
        return Ok(WorstCaseResult::nominal(s, eps, false));
    }
    let mean = riskstats::mean(s);
    let var = riskstats::variance(s);
    let delta = (2.0 * eps / var).sqrt();
    let q: Vec<f64> = s
        .probs()
        .iter()
        .zip(s.costs())
        .map(|(p, f)| p * (1.0 + delta * (f - mean)))
        .collect();
    if q.iter().all(|&v| v >= 0.0) {
        let mut r = WorstCaseResult::from_q(s, eps, q, DualCertificate::SmoothPhi { delta, c: -mean });
        r.value = mean + (2.0 * var * eps).sqrt();
        Ok(r)
    } else {
        wc_smooth_phi(s, &Phi::ModifiedChi2, eps)
    }
}

/// Worst-case tilt for a fixed inverse multiplier `delta`: returns the
/// shift `c` normalising `Σ p_i [φ']⁻¹(delta (f_i + c))` and the (unnormalised)
/// distribution.
fn tilt<P: PhiFunction + ?Sized>(s: &Scenario, phi: &P, delta: f64) -> (f64, Vec<f64>) {
    let (fmin, fmax) = (s.min_cost(), s.max_cost());
    let mass = |c: f64| {
        ksum(s.probs().iter().zip(s.costs()).map(|(p, f)| p * phi.tilted_ratio(delta * (f + c)))) - 1.0
    };
    let c = solve_increasing(mass, -fmax, -fmin, ROOT_TOL);
    let q = s
        .probs()
        .iter()
        .zip(s.costs())
        .map(|(p, f)| p * phi.tilted_ratio(delta * (f + c)))
        .collect();
    (c, q)
}

fn normalised(mut q: Vec<f64>) -> Vec<f64> {
    let total = ksum(q.iter().copied());
    if total > 0.0 {
        for v in q.iter_mut() {
            *v /= total;
        }
    }
    q
}

/// Residuals of the two first-order conditions of the smooth-φ dual at
/// `(delta, c)`: `(Σ p φ*'(ζ) - 1, Σ p {φ*(ζ) - φ*'(ζ) ζ} + eps)`.
pub fn smooth_phi_residuals<P: PhiFunction + ?Sized>(s: &Scenario, phi: &P, eps: f64, delta: f64, c: f64) -> (f64, f64) {
    let ratios: Vec<f64> = s.costs().iter().map(|f| phi.tilted_ratio(delta * (f + c))).collect();
    let mass = ksum(s.probs().iter().zip(&ratios).map(|(p, z)| p * z)) - 1.0;
    let div = ksum(s.probs().iter().zip(&ratios).map(|(p, &z)| p * phi.value(z)));
    (mass, eps - div)
}

/// Smallest divergence of a distribution concentrated on the maximal costs,
/// and that distribution.
fn saturation_point<P: PhiFunction + ?Sized>(s: &Scenario, phi: &P) -> (f64, Vec<f64>) {
    let fmax = s.max_cost();
    let top: f64 = ksum(s.costs().iter().zip(s.probs()).filter(|(f, _)| **f == fmax).map(|(_, p)| *p));
    let q: Vec<f64> = s
        .costs()
        .iter()
        .zip(s.probs())
        .map(|(&f, &p)| if f == fmax { p / top } else { 0.0 })
        .collect();
    (divergence(phi, s.probs(), &q), q)
}

/// Ball `Σ p_i φ(q_i / p_i) <= eps` for a smooth φ, solved exactly through
/// the first-order conditions of the dual: the shift `c` for a given
/// multiplier, then the multiplier `delta` matching the divergence budget.
pub fn wc_smooth_phi<P: PhiFunction + ?Sized>(s: &Scenario, phi: &P, eps: f64) -> Result<WorstCaseResult> {
    check_eps(eps, f64::INFINITY)?;
    if s.is_constant() {
        return Ok(WorstCaseResult::nominal(s, eps, true));
    }
    if eps == 0.0 {
        return Ok(WorstCaseResult::nominal(s, eps, false));
    }
    let (cap, q_top) = saturation_point(s, phi);
    if eps >= cap {
        let mut r = WorstCaseResult::from_q(s, eps, q_top, DualCertificate::SmoothPhi { delta: f64::INFINITY, c: -s.max_cost() });
        r.clamped = true;
        return Ok(r);
    }
    let excess = |delta: f64| {
        let (_, q) = tilt(s, phi, delta);
        divergence(phi, s.probs(), &normalised(q)) - eps
    };
    let var = riskstats::variance(s);
    let lo = 1e-14;
    let mut hi = 2.0 * (2.0 * phi.curvature_at_one() * eps / var).sqrt();
    let mut bracketed = false;
    for _ in 0..200 {
        if excess(hi) >= 0.0 {
            bracketed = true;
            break;
        }
        hi *= 2.0;
    }
    if !bracketed {
        return Err(Error::NoBracket { lo, hi });
    }
    let lo = if excess(lo) >= 0.0 { 0.0 } else { lo };
    let delta = solve_increasing(excess, lo, hi, ROOT_TOL);
    let (c, q) = tilt(s, phi, delta);
    Ok(WorstCaseResult::from_q(s, eps, normalised(q), DualCertificate::SmoothPhi { delta, c }))
}

/// Penalised φ problem `max_q q.f - (1/delta) Σ p φ(q/p)`; `delta = 0` is the nominal.
pub fn wc_penalty_phi<P: PhiFunction + ?Sized>(s: &Scenario, phi: &P, delta: f64) -> Result<WorstCaseResult> {
    check_eps(delta, f64::INFINITY)?;
    if s.is_constant() {
        return Ok(WorstCaseResult::nominal(s, delta, true));
    }
    if delta == 0.0 {
        return Ok(WorstCaseResult::nominal(s, delta, false));
    }
    let (c, q) = tilt(s, phi, delta);
    Ok(WorstCaseResult::from_q(s, delta, normalised(q), DualCertificate::SmoothPhi { delta, c }))
}

/// Total-variation ball `Σ |q_i - p_i| <= eps`, `eps` in `[0, 2]`.
///
/// Moves `eps/2` of mass onto the most expensive atom, taking it from the
/// cheapest atoms first. Radii above 2 are clamped (the ball is then the
/// whole simplex).
pub fn wc_tv(s: &Scenario, eps: f64) -> Result<WorstCaseResult> {
    check_eps(eps, f64::INFINITY)?;
    let clamped = eps > 2.0;
    let eps_used = eps.min(2.0);
    if s.is_constant() {
        let mut r = WorstCaseResult::nominal(s, eps, true);
        r.clamped = clamped;
        return Ok(r);
    }
    let sorted = s.sorted_desc();
    let n = sorted.len();
    let mut q = sorted.probs_desc.clone();
    let moved = (0.5 * eps_used).min(1.0 - q[0]);
    q[0] += moved;
    let mut left = moved;
    for rank in (1..n).rev() {
        if left <= 0.0 {
            break;
        }
        let take = left.min(q[rank]);
        q[rank] -= take;
        left -= take;
    }
    let dual = if eps_used < s.min_prob() {
        let (hi, lo) = (sorted.costs_desc[0], sorted.costs_desc[n - 1]);
        DualCertificate::TotalVariation { theta: 0.5 * (hi + lo), lambda: 0.5 * (hi - lo) }
    } else {
        DualCertificate::None
    };
    let mut r = WorstCaseResult::from_q(s, eps, sorted.unsort(&q), dual);
    r.clamped = clamped;
    Ok(r)
}

/// Largest meaningful budget `max_i (1/p_i - 1)`; beyond it every
/// distribution is admissible.
pub fn budgeted_eps_max(s: &Scenario) -> f64 {
    1.0 / s.min_prob() - 1.0
}

/// Budgeted set `0 <= q <= (1 + eps) p`. The value equals CVaR at level
/// `eps / (1 + eps)`; the certificate carries the right slope of the current
/// linear piece, `Σ_{i<k} p_(i) (f_(i) - f_(k))` with `k` the partially
/// filled rank.
pub fn wc_budgeted(s: &Scenario, eps: f64) -> Result<WorstCaseResult> {
    check_eps(eps, f64::INFINITY)?;
    let eps_max = budgeted_eps_max(s);
    let clamped = eps > eps_max;
    let eps_used = eps.min(eps_max);
    if s.is_constant() {
        let mut r = WorstCaseResult::nominal(s, eps, true);
        r.clamped = clamped;
        return Ok(r);
    }
    let level = budget_level(eps_used);
    let sorted = s.sorted_desc();
    let fill = greedy_fill(&sorted, level);
    let k = fill.partial;
    let fk = sorted.costs_desc[k];
    let slope = ksum((0..k).map(|i| sorted.probs_desc[i] * (sorted.costs_desc[i] - fk)));
    let q = sorted.unsort(&fill.q_desc);
    Ok(WorstCaseResult {
        epsilon: eps,
        value: s.min_cost() + fill.excess,
        worst_q: q,
        dual: DualCertificate::Budgeted { slope },
        degenerate: false,
        clamped,
    })
}

/// CVaR level equivalent to budget `eps`: `eps / (1 + eps)`.
pub fn budget_level(eps: f64) -> CvarLevel {
    CvarLevel::from_budget(eps).expect("eps/(1+eps) lies in [0,1) for eps >= 0")
}

/// Budget breakpoints `eps_(h)` where `V_b` changes slope, ascending, from
/// `0` up to `budgeted_eps_max`.
pub fn budgeted_breakpoints(s: &Scenario) -> Vec<f64> {
    let sorted = s.sorted_desc();
    let n = sorted.len();
    let mut out = vec![0.0];
    // with k atoms saturated the fill completes exactly when (1+eps) P_k = 1
    for k in (1..n).rev() {
        let head = ksum(sorted.probs_desc[..k].iter().copied());
        let tail = ksum(sorted.probs_desc[k..].iter().copied());
        out.push(tail / head);
    }
    out
}

/// Mixture `(1 - eps) p + eps Q_CVaR(alpha)`, `eps` in `[0, 1]`.
pub fn wc_combination(s: &Scenario, alpha: CvarLevel, eps: f64) -> Result<WorstCaseResult> {
    check_eps(eps, 1.0)?;
    if s.is_constant() {
        return Ok(WorstCaseResult::nominal(s, eps, true));
    }
    let sorted = s.sorted_desc();
    let fill = greedy_fill(&sorted, alpha);
    let q_cvar = sorted.unsort(&fill.q_desc);
    let q = s.probs().iter().zip(&q_cvar).map(|(p, c)| (1.0 - eps) * p + eps * c).collect();
    let value = s.min_cost() + (1.0 - eps) * mean_excess(s) + eps * fill.excess;
    Ok(WorstCaseResult { epsilon: eps, value, worst_q: q, dual: DualCertificate::None, degenerate: false, clamped: false })
}

/// Likelihood-ratio box `L p <= q <= U p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxParams {
    lower: f64,
    upper: f64,
}

impl BoxParams {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lower) || !(upper >= 1.0) || !upper.is_finite() {
            return Err(Error::InvalidParameter(format!("box bounds need 0 <= L <= 1 <= U < inf, got L={lower}, U={upper}")));
        }
        Ok(Self { lower, upper })
    }

    /// `U = 1/L = 1 + nu`.
    pub fn symmetric(nu: f64) -> Result<Self> {
        if !(nu >= 0.0) {
            return Err(Error::InvalidParameter(format!("nu = {nu} must be nonnegative")));
        }
        Self::new(1.0 / (1.0 + nu), 1.0 + nu)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }
}

/// `V = L E + (1 - L) CVaR_{(U-1)/(U-L)}`.
pub fn wc_box(s: &Scenario, b: BoxParams) -> Result<WorstCaseResult> {
    let (l, u) = (b.lower, b.upper);
    let width = u - 1.0;
    if s.is_constant() {
        return Ok(WorstCaseResult::nominal(s, width, true));
    }
    if l == 1.0 || u == 1.0 {
        return Ok(WorstCaseResult::nominal(s, width, false));
    }
    let alpha = CvarLevel::new((u - 1.0) / (u - l))?;
    let sorted = s.sorted_desc();
    let fill = greedy_fill(&sorted, alpha);
    let q_cvar = sorted.unsort(&fill.q_desc);
    let q = s.probs().iter().zip(&q_cvar).map(|(p, c)| l * p + (1.0 - l) * c).collect();
    let value = s.min_cost() + l * mean_excess(s) + (1.0 - l) * fill.excess;
    Ok(WorstCaseResult { epsilon: width, value, worst_q: q, dual: DualCertificate::None, degenerate: false, clamped: false })
}

/// Symmetric box with `U = 1/L = 1 + nu`.
pub fn wc_box_symmetric(s: &Scenario, nu: f64) -> Result<WorstCaseResult> {
    let mut r = wc_box(s, BoxParams::symmetric(nu)?)?;
    r.epsilon = nu;
    Ok(r)
}

/// Type-1 Wasserstein ball around the empirical distribution on `points`
/// for a scalar piecewise-linear cost.
///
/// Returns `V = E + eps * lambda` where `lambda` is the least dual solution
/// at radius zero. The certificate also reports the radius up to which this
/// is exact: the mass-weighted transport distance over which the best ratio
/// is realised from a single support point (infinite when it is an
/// asymptotic slope). Beyond that radius the value comes from minimising the
/// full dual instead and `lambda` is its minimiser. `worst_q` holds the
/// unchanged atom weights; mass is moved to new locations rather than
/// reweighted.
pub fn wc_wasserstein_pl(points: &[f64], probs: &[f64], cost: &PiecewiseLinearCost, eps: f64) -> Result<WorstCaseResult> {
    check_eps(eps, f64::INFINITY)?;
    let costs: Vec<f64> = points.iter().map(|&y| cost.eval(y)).collect();
    let s = Scenario::new(costs, Some(probs.to_vec()))?;
    let mut lambda = 0.0f64;
    let mut reaches = Vec::with_capacity(points.len());
    for (index, &y) in points.iter().enumerate() {
        let (ratio, reach) = cost.sup_ratio_with_reach(y);
        if !ratio.is_finite() && ratio > 0.0 {
            return Err(Error::UnboundedRatio { index });
        }
        lambda = lambda.max(ratio);
        reaches.push((ratio, reach));
    }
    let tol = 1e-12 * lambda.abs().max(1.0);
    let exact_radius = if lambda == 0.0 {
        f64::INFINITY
    } else {
        reaches
            .iter()
            .zip(probs)
            .filter(|((r, _), _)| (r - lambda).abs() <= tol)
            .map(|((_, reach), p)| p * reach)
            .fold(0.0, f64::max)
    };
    let degenerate = cost.slopes().iter().all(|&k| k == 0.0);
    let (value, lambda) = if eps <= exact_radius {
        (riskstats::mean(&s) + eps * lambda, lambda)
    } else {
        crate::oracle::wasserstein_pl_dual(points, probs, cost, eps)
    };
    Ok(WorstCaseResult {
        epsilon: eps,
        value,
        worst_q: s.probs().to_vec(),
        dual: DualCertificate::Wasserstein { lambda, exact_radius },
        degenerate,
        clamped: false,
    })
}

/// Dispatch for every family defined on a fixed scenario. Smooth-φ and
/// penalty families take the divergence radius / inverse penalty as `eps`;
/// the symmetric box takes `nu`.
pub fn worst_case(s: &Scenario, family: UncertaintyFamily, eps: f64) -> Result<WorstCaseResult> {
    match family {
        UncertaintyFamily::SmoothPhi { phi: Phi::ModifiedChi2 } => wc_chi2(s, eps),
        UncertaintyFamily::SmoothPhi { phi } => wc_smooth_phi(s, &phi, eps),
        UncertaintyFamily::PenaltyPhi { phi } => wc_penalty_phi(s, &phi, eps),
        UncertaintyFamily::TotalVariation => wc_tv(s, eps),
        UncertaintyFamily::Budgeted => wc_budgeted(s, eps),
        UncertaintyFamily::Combination { alpha } => wc_combination(s, CvarLevel::new(alpha)?, eps),
        UncertaintyFamily::SymmetricBox => wc_box_symmetric(s, eps),
        UncertaintyFamily::WassersteinL1 => Err(Error::InvalidParameter(
            "Wasserstein worst case needs a cost model over the support".into(),
        )),
    }
}

/// Expected cost of `q` against the scenario costs.
pub fn expected_under(s: &Scenario, q: &[f64]) -> f64 {
    expectation(s, q)
}
