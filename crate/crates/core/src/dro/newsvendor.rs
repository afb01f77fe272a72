use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Scenario, UncertaintyFamily, WorstCaseResult};
use crate::numeric::golden_min;
use crate::plcost::PiecewiseLinearCost;
use crate::riskstats;
use crate::worstcase::{wc_wasserstein_pl, worst_case};

/// Revenue `r`, order cost `c`, salvage `q` and shortage penalty `s`, all per unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewsvendorParams {
    pub r: f64,
    pub c: f64,
    pub q: f64,
    pub s: f64,
}

impl NewsvendorParams {
    /// Requires `0 <= q < c < r` and `s >= 0`.
    pub fn new(r: f64, c: f64, q: f64, s: f64) -> Result<Self> {
        if !(0.0 <= q && q < c && c < r && s >= 0.0) || !r.is_finite() || !s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= q < c < r and s >= 0, got r={r}, c={c}, q={q}, s={s}"
            )));
        }
        Ok(Self { r, c, q, s })
    }

    /// `(r + s - c) / (r + s - q)`.
    pub fn critical_fractile(&self) -> f64 {
        (self.r + self.s - self.c) / (self.r + self.s - self.q)
    }

    fn cost(&self, x: f64, y: f64) -> f64 {
        -self.r * x.min(y) - self.q * (x - y).max(0.0) + self.s * (y - x).max(0.0) + self.c * x
    }

    /// The cost as a function of demand for a fixed order quantity.
    pub fn cost_in_demand(&self, x: f64) -> Result<PiecewiseLinearCost> {
        PiecewiseLinearCost::new(vec![x], vec![-(self.r - self.q), self.s], (self.c - self.r) * x, (0.0, f64::INFINITY))
    }
}

pub fn newsvendor_cost(params: &NewsvendorParams, x: f64, y: f64) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0) {
        return Err(Error::InvalidParameter(format!("order and demand must be nonnegative, got x={x}, y={y}")));
    }
    Ok(params.cost(x, y))
}

/// Scenario of costs at order `x`, one atom per demand atom.
pub fn cost_scenario(params: &NewsvendorParams, demand: &Scenario, x: f64) -> Scenario {
    let costs = demand.costs().iter().map(|&y| params.cost(x, y)).collect();
    demand.with_costs(costs).expect("costs of a valid demand scenario are finite")
}

fn check_demand(demand: &Scenario) -> Result<()> {
    match demand.costs().iter().position(|&y| y < 0.0) {
        Some(i) => Err(Error::InvalidParameter(format!("demand atom {i} is negative"))),
        None => Ok(()),
    }
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

/// Minimiser of the nominal expected cost. The objective is piecewise
/// linear with kinks at the demand atoms, so the atoms and midpoints
/// between them are searched; ties go to the smaller order.
pub fn saa_newsvendor(params: &NewsvendorParams, demand: &Scenario) -> Result<f64> {
    check_demand(demand)?;
    let mut atoms = demand.costs().to_vec();
    atoms.sort_by(f64::total_cmp);
    atoms.dedup();
    let mut cands = atoms.clone();
    cands.extend(atoms.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    cands.sort_by(f64::total_cmp);
    let mut best = (cands[0], riskstats::mean(&cost_scenario(params, demand, cands[0])));
    for &x in &cands[1..] {
        let v = riskstats::mean(&cost_scenario(params, demand, x));
        if v < best.1 && !near(v, best.1) {
            best = (x, v);
        }
    }
    Ok(best.0)
}

/// Worst-case expected cost of order `x`.
pub fn newsvendor_worst_case(
    params: &NewsvendorParams,
    demand: &Scenario,
    family: UncertaintyFamily,
    eps: f64,
    x: f64,
) -> Result<WorstCaseResult> {
    match family {
        UncertaintyFamily::WassersteinL1 => {
            wc_wasserstein_pl(demand.costs(), demand.probs(), &params.cost_in_demand(x)?, eps)
        }
        _ => worst_case(&cost_scenario(params, demand, x), family, eps),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewsvendorSolution {
    pub order: f64,
    pub worst_case: WorstCaseResult,
}

/// Minimises `V(eps, x)` over `x`.
///
/// Candidates are the demand atoms and a 400-point grid on
/// `[0, 1.5 max Y]`. `V` is convex in `x`, so the bracket formed by the
/// incumbent's neighbours is refined by golden-section search; the refined
/// point only replaces the incumbent if it is strictly better. Ties go to
/// the smaller order: if `V` is flat to the left of the winner, the left
/// end of the flat stretch is located by bisection.
pub fn dro_newsvendor(
    params: &NewsvendorParams,
    demand: &Scenario,
    family: UncertaintyFamily,
    eps: f64,
) -> Result<NewsvendorSolution> {
    check_demand(demand)?;
    let value = |x: f64| newsvendor_worst_case(params, demand, family, eps, x).map(|w| w.value);
    let top = 1.5 * demand.max_cost();
    let mut cands: Vec<f64> = demand.costs().to_vec();
    if top > 0.0 {
        cands.extend((0..400).map(|k| top * k as f64 / 399.0));
    }
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let mut vals = Vec::with_capacity(cands.len());
    for &x in &cands {
        vals.push(value(x)?);
    }
    let mut k = 0;
    for j in 1..cands.len() {
        if vals[j] < vals[k] && !near(vals[j], vals[k]) {
            k = j;
        }
    }
    let (mut x_best, mut v_best) = (cands[k], vals[k]);

    if cands.len() > 1 {
        let a = cands[k.saturating_sub(1)];
        let b = cands[(k + 1).min(cands.len() - 1)];
        let mut err = None;
        let (xg, vg) = golden_min(
            |x| match value(x) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    f64::INFINITY
                }
            },
            a,
            b,
            1e-14,
        );
        if let Some(e) = err {
            return Err(e);
        }
        if vg < v_best && !near(vg, v_best) {
            x_best = xg;
            v_best = vg;
        }
    }

    // leftmost point of a flat minimum
    let probe = x_best - 1e-7 * (1.0 + x_best.abs());
    if probe >= 0.0 && near(value(probe)?, v_best) {
        let mut lo = cands.iter().rev().copied().find(|&c| c < probe && !near(vals_at(&cands, &vals, c), v_best));
        if lo.is_none() && !near(value(0.0)?, v_best) {
            lo = Some(0.0);
        }
        let mut hi = probe;
        match lo {
            Some(mut lo) => {
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if near(value(mid)?, v_best) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                x_best = hi;
            }
            None => x_best = 0.0,
        }
    }
    let worst_case = newsvendor_worst_case(params, demand, family, eps, x_best)?;
    Ok(NewsvendorSolution { order: x_best, worst_case })
}

fn vals_at(cands: &[f64], vals: &[f64], x: f64) -> f64 {
    let i = cands.iter().position(|&c| c == x).expect("candidate");
    vals[i]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Growth;
    use crate::sensitivity::wasserstein_sensitivity;
    use crate::Phi;

    fn params() -> NewsvendorParams {
        NewsvendorParams::new(10.0, 2.0, 0.0, 4.0).unwrap()
    }

    fn two_atoms() -> Scenario {
        Scenario::uniform(vec![10.0, 20.0]).unwrap()
    }

    #[test]
    fn cost_examples() {
        let p = params();
        assert_eq!(newsvendor_cost(&p, 15.0, 10.0).unwrap(), -70.0);
        assert_eq!(newsvendor_cost(&p, 15.0, 20.0).unwrap(), -100.0);
        assert_eq!(newsvendor_cost(&p, 10.0, 10.0).unwrap(), -80.0);
        assert!(newsvendor_cost(&p, -1.0, 10.0).is_err());
    }

    #[test]
    fn params_validated() {
        assert!(NewsvendorParams::new(10.0, 12.0, 0.0, 4.0).is_err());
        assert!(NewsvendorParams::new(10.0, 2.0, 3.0, 4.0).is_err());
        assert!(NewsvendorParams::new(10.0, 2.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn saa_examples() {
        let p = params();
        let seven = Scenario::uniform((1..=7).map(|k| 10.0 * k as f64).collect()).unwrap();
        assert_eq!(saa_newsvendor(&p, &seven).unwrap(), 60.0);
        assert_eq!(saa_newsvendor(&p, &two_atoms()).unwrap(), 20.0);
        let tight = NewsvendorParams::new(10.0, 9.999, 0.0, 0.0).unwrap();
        assert_eq!(saa_newsvendor(&tight, &seven).unwrap(), 10.0);
    }

    #[test]
    fn cost_in_demand_matches_cost() {
        let p = params();
        let pl = p.cost_in_demand(15.0).unwrap();
        for y in [0.0, 3.0, 15.0, 20.0, 100.0] {
            assert!((pl.eval(y) - p.cost(15.0, y)).abs() < 1e-12);
        }
    }

    #[test]
    fn budgeted_two_atom_instance() {
        let sol = dro_newsvendor(&params(), &two_atoms(), UncertaintyFamily::Budgeted, 1.0).unwrap();
        assert!((sol.order - 90.0 / 7.0).abs() < 1e-9, "{}", sol.order);
        assert!((sol.worst_case.value + 520.0 / 7.0).abs() < 1e-9);
    }

    #[test]
    fn zero_radius_is_saa() {
        let families = [
            UncertaintyFamily::SmoothPhi { phi: Phi::ModifiedChi2 },
            UncertaintyFamily::SmoothPhi { phi: Phi::Kl },
            UncertaintyFamily::TotalVariation,
            UncertaintyFamily::Budgeted,
            UncertaintyFamily::Combination { alpha: 0.9 },
            UncertaintyFamily::WassersteinL1,
        ];
        for f in families {
            let sol = dro_newsvendor(&params(), &two_atoms(), f, 0.0).unwrap();
            assert_eq!(sol.order, 20.0, "{f:?}");
        }
    }

    #[test]
    fn wasserstein_small_radius_keeps_saa() {
        let sol = dro_newsvendor(&params(), &two_atoms(), UncertaintyFamily::WassersteinL1, 0.5).unwrap();
        assert_eq!(sol.order, 20.0);
    }

    #[test]
    fn wasserstein_sensitivity_is_flat_inside_support() {
        let p = params();
        let d = two_atoms();
        for k in 1..20 {
            let x = 10.0 + 10.0 * k as f64 / 20.0;
            let pl = p.cost_in_demand(x).unwrap();
            let s = wasserstein_sensitivity(d.costs(), d.probs(), &pl).unwrap();
            assert_eq!(s.value, 10.0);
            assert_eq!(s.growth, Growth::Linear);
        }
    }
}
