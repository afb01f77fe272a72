//! Scalar risk statistics of a scenario: moments, CVaR and its deviation,
//! and the tight CVaR-deviation / standard-deviation constant for uniform
//! weights.

use crate::error::{Error, Result};
use crate::model::{CvarLevel, Scenario, SortedScenario};
use crate::numeric::{ksum, KahanSum};

/// `Σ p_i f_i`, accumulated as `min(f) + Σ p_i (f_i - min(f))`.
pub fn mean(s: &Scenario) -> f64 {
    s.min_cost() + mean_excess(s)
}

/// `Σ p_i (f_i - min f)`; exactly zero for constant costs.
pub(crate) fn mean_excess(s: &Scenario) -> f64 {
    let lo = s.min_cost();
    ksum(s.probs().iter().zip(s.costs()).map(|(p, f)| p * (f - lo)))
}

pub fn variance(s: &Scenario) -> f64 {
    if s.is_constant() {
        return 0.0;
    }
    let m = mean(s);
    ksum(s.probs().iter().zip(s.costs()).map(|(p, f)| p * (f - m) * (f - m)))
}

pub fn std_dev(s: &Scenario) -> f64 {
    variance(s).sqrt()
}

/// Greedy solution of `max q.f  s.t. 1'q = 1, 0 <= q <= cap_factor * p`,
/// in descending-cost order.
#[derive(Debug, Clone)]
pub(crate) struct GreedyFill {
    /// Mass by rank.
    pub q_desc: Vec<f64>,
    /// Rank of the atom that completes the unit of mass.
    pub partial: usize,
    /// `Σ q (f - min f)`.
    pub excess: f64,
}

pub(crate) fn greedy_fill(sorted: &SortedScenario, level: CvarLevel) -> GreedyFill {
    let n = sorted.len();
    let lo = sorted.costs_desc[n - 1];
    let (cap_factor, surplus) = (level.cap_factor(), level.cap_surplus());
    let mut q_desc = vec![0.0; n];
    let mut partial = n - 1;
    let mut head = KahanSum::new();
    for rank in 0..n {
        // mass still unplaced, 1 - cap * head, written to avoid cancelling against 1
        let tail = ksum(sorted.probs_desc[rank..].iter().copied());
        let remaining = tail - surplus * head.value();
        let cap = cap_factor * sorted.probs_desc[rank];
        if cap >= remaining - 1e-15 || rank == n - 1 {
            q_desc[rank] = remaining.max(0.0);
            partial = rank;
            break;
        }
        q_desc[rank] = cap;
        head.add(sorted.probs_desc[rank]);
    }
    let excess = ksum(q_desc.iter().zip(&sorted.costs_desc).map(|(q, f)| q * (f - lo)));
    GreedyFill { q_desc, partial, excess }
}

/// Conditional value-at-risk: the optimum of the capped LP with caps `p/(1-alpha)`.
pub fn cvar(s: &Scenario, alpha: CvarLevel) -> f64 {
    let sorted = s.sorted_desc();
    s.min_cost() + greedy_fill(&sorted, alpha).excess
}

/// Cost of the atom that receives the last (possibly partial) unit of mass
/// in the greedy CVaR fill.
pub fn var_quantile(s: &Scenario, alpha: CvarLevel) -> f64 {
    let sorted = s.sorted_desc();
    let fill = greedy_fill(&sorted, alpha);
    sorted.costs_desc[fill.partial]
}

/// `CVaR_alpha(f) - E_p(f)`, never negative.
pub fn cvar_deviation(s: &Scenario, alpha: CvarLevel) -> f64 {
    if s.is_constant() {
        return 0.0;
    }
    let sorted = s.sorted_desc();
    (greedy_fill(&sorted, alpha).excess - mean_excess(s)).max(0.0)
}

pub fn range(s: &Scenario) -> f64 {
    s.max_cost() - s.min_cost()
}

fn kappa(n: usize, alpha: CvarLevel) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    let mut kappa = n as f64 * (1.0 - alpha.value());
    let nearest = kappa.round();
    if (kappa - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        kappa = nearest;
    }
    if !(kappa > 0.0 && kappa < n as f64) {
        return Err(Error::KappaOutOfRange { kappa, n });
    }
    Ok(kappa)
}

/// Smallest constant `C` with `CVaR_alpha(f) - E(f) <= C * sd(f)` for every
/// `f` under uniform weights on `n` atoms.
pub fn c_alpha_n(n: usize, alpha: CvarLevel) -> Result<f64> {
    let kappa = kappa(n, alpha)?;
    let k = kappa.floor();
    let frac = kappa - k;
    let nf = n as f64;
    Ok((nf * (k + frac * frac) - kappa * kappa).max(0.0).sqrt() / kappa)
}

/// A zero-mean vector (largest entry first) attaining the `c_alpha_n` bound.
pub fn tight_cvar_vector(n: usize, alpha: CvarLevel) -> Result<Vec<f64>> {
    let kappa = kappa(n, alpha)?;
    let nf = n as f64;
    let k = kappa.floor();
    let frac = kappa - k;
    let denom = nf * (k + frac * frac) - kappa * kappa;
    let top = kappa * (nf - kappa) / denom;
    let mid = (nf * kappa * frac - kappa * kappa) / denom;
    let tail = -kappa * kappa / denom;
    let k = k as usize;
    Ok((0..n)
        .map(|j| match j.cmp(&k) {
            std::cmp::Ordering::Less => top,
            std::cmp::Ordering::Equal => mid,
            std::cmp::Ordering::Greater => tail,
        })
        .collect())
}

/// `c_alpha_n(n, alpha) * sd(f)`, defined only for uniform weights.
pub fn cvar_deviation_bound(s: &Scenario, alpha: CvarLevel) -> Result<f64> {
    if !s.is_uniform() {
        return Err(Error::InvalidParameter(
            "the CVaR-deviation bound is only established for uniform probabilities".into(),
        ));
    }
    Ok(c_alpha_n(s.len(), alpha)? * std_dev(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lvl(a: f64) -> CvarLevel {
        CvarLevel::new(a).unwrap()
    }

    fn uni(c: &[f64]) -> Scenario {
        Scenario::uniform(c.to_vec()).unwrap()
    }

    #[test]
    fn moments() {
        assert_eq!(mean(&uni(&[1.0, 5.0, 3.0])), 3.0);
        assert_eq!(mean(&uni(&[0.0, 10.0])), 5.0);
        assert_eq!(mean(&uni(&[4.2, 4.2, 4.2])), 4.2);
        assert_eq!(variance(&uni(&[0.0, 10.0])), 25.0);
        assert!((variance(&uni(&[1.0, 5.0, 3.0])) - 8.0 / 3.0).abs() < 1e-14);
        assert_eq!(variance(&uni(&[-2.5; 4])), 0.0);
    }

    #[test]
    fn cvar_examples() {
        assert_eq!(cvar(&uni(&[0.0, 10.0]), lvl(0.5)), 10.0);
        assert!((cvar(&uni(&[1.0, 5.0, 3.0]), lvl(0.0)) - 3.0).abs() < 1e-15);
        assert!((cvar(&uni(&[1.0, 5.0, 3.0]), lvl(2.0 / 3.0)) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn var_examples() {
        assert_eq!(var_quantile(&uni(&[1.0, 5.0, 3.0]), lvl(0.5)), 3.0);
        assert_eq!(var_quantile(&uni(&[0.0, 10.0]), lvl(0.5)), 10.0);
        assert_eq!(var_quantile(&uni(&[3.0, 3.0, 3.0]), lvl(0.3)), 3.0);
        assert_eq!(var_quantile(&uni(&[1.0, 5.0, 3.0]), lvl(0.0)), 1.0);
    }

    #[test]
    fn cvar_deviation_examples() {
        assert_eq!(cvar_deviation(&uni(&[0.0, 10.0]), lvl(0.5)), 5.0);
        assert_eq!(cvar_deviation(&uni(&[7.0, 7.0, 7.0]), lvl(0.9)), 0.0);
        assert!((cvar_deviation(&uni(&[1.0, 5.0, 3.0]), lvl(2.0 / 3.0)) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn c_alpha_n_examples() {
        assert!((c_alpha_n(4, lvl(0.75)).unwrap() - 3f64.sqrt()).abs() < 1e-12);
        assert!((c_alpha_n(5, lvl(0.7)).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!((c_alpha_n(10, lvl(0.9)).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(c_alpha_n(4, lvl(0.0)).unwrap_err().code(), "KappaOutOfRange");
    }

    #[test]
    fn tight_vector_example() {
        let z = tight_cvar_vector(4, lvl(0.75)).unwrap();
        let want = [1.0, -1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        for (a, b) in z.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        let s = uni(&z);
        assert!(mean(&s).abs() < 1e-14);
        let ratio = cvar_deviation(&s, lvl(0.75)) / std_dev(&s);
        assert!((ratio - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bound_refuses_nonuniform() {
        let s = Scenario::new(vec![0.0, 1.0], Some(vec![0.3, 0.7])).unwrap();
        assert!(cvar_deviation_bound(&s, lvl(0.5)).is_err());
    }
}
