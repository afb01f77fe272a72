//! Brute-force verifiers. Nothing here shares a code path with the closed
//! forms and solvers it is used to check: worst cases come from simplex grids
//! or from enumerating basic feasible solutions of the defining LP, and
//! sensitivities from difference quotients of a supplied value function.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Growth, Scenario};
use crate::plcost::PiecewiseLinearCost;
use crate::rng::SplitMix64;

const FEAS_TOL: f64 = 1e-12;

/// Ambiguity sets described directly by their defining constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleSet {
    /// `Σ |q - p| <= eps`.
    TotalVariation { eps: f64 },
    /// `0 <= q <= (1 + eps) p`.
    Budgeted { eps: f64 },
    /// `(1 - eps) p <= q <= (1 - eps) p + eps p / (1 - alpha)`.
    Combination { alpha: f64, eps: f64 },
    /// `L p <= q <= U p`.
    Box { lower: f64, upper: f64 },
    /// `Σ p (q/p - 1)² / 2 <= eps`.
    ModifiedChi2 { eps: f64 },
    /// `Σ q ln(q/p) <= eps`.
    Kl { eps: f64 },
}

impl OracleSet {
    /// Membership of a probability vector `q`, up to `1e-12`.
    pub fn contains(&self, p: &[f64], q: &[f64]) -> bool {
        match *self {
            OracleSet::TotalVariation { eps } => {
                q.iter().zip(p).map(|(a, b)| (a - b).abs()).sum::<f64>() <= eps + FEAS_TOL
            }
            OracleSet::ModifiedChi2 { eps } => {
                q.iter().zip(p).map(|(a, b)| 0.5 * b * (a / b - 1.0).powi(2)).sum::<f64>() <= eps + FEAS_TOL
            }
            OracleSet::Kl { eps } => {
                q.iter().zip(p).map(|(&a, &b)| if a > 0.0 { a * (a / b).ln() } else { 0.0 }).sum::<f64>()
                    <= eps + FEAS_TOL
            }
            _ => {
                let (lo, hi) = self.bounds(p).expect("polyhedral box-type set");
                q.iter().zip(lo.iter().zip(&hi)).all(|(v, (l, h))| *v >= l - FEAS_TOL && *v <= h + FEAS_TOL)
            }
        }
    }

    /// Per-atom bounds for the sets that are boxes intersected with the simplex.
    fn bounds(&self, p: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        let (lo, hi): (Box<dyn Fn(f64) -> f64>, Box<dyn Fn(f64) -> f64>) = match *self {
            OracleSet::Budgeted { eps } => (Box::new(|_| 0.0), Box::new(move |pi| (1.0 + eps) * pi)),
            OracleSet::Combination { alpha, eps } => (
                Box::new(move |pi| (1.0 - eps) * pi),
                Box::new(move |pi| (1.0 - eps) * pi + eps * pi / (1.0 - alpha)),
            ),
            OracleSet::Box { lower, upper } => (Box::new(move |pi| lower * pi), Box::new(move |pi| upper * pi)),
            _ => return None,
        };
        Some((p.iter().map(|&v| lo(v)).collect(), p.iter().map(|&v| hi(v)).collect()))
    }

    /// The defining LP `max f.x`, when the set is polyhedral.
    pub fn lp(&self, s: &Scenario) -> Option<SmallLp> {
        let p = s.probs();
        let n = p.len();
        if let Some((lo, hi)) = self.bounds(p) {
            return Some(SmallLp {
                offset: 0.0,
                objective: s.costs().to_vec(),
                lower: lo,
                upper: hi,
                eq: vec![(vec![1.0; n], 1.0)],
                le: vec![],
            });
        }
        match *self {
            OracleSet::TotalVariation { eps } => {
                // variables: up (n), down (n); q = p + up - down
                let mut objective = s.costs().to_vec();
                objective.extend(s.costs().iter().map(|f| -f));
                let mut balance = vec![1.0; n];
                balance.extend(vec![-1.0; n]);
                let lower = vec![0.0; 2 * n];
                let mut upper = vec![f64::INFINITY; n];
                upper.extend_from_slice(p);
                Some(SmallLp {
                    offset: dot(p, s.costs()),
                    objective,
                    lower,
                    upper,
                    eq: vec![(balance, 0.0)],
                    le: vec![(vec![1.0; 2 * n], eps)],
                })
            }
            _ => None,
        }
    }
}

/// `max offset + c.x  s.t.  lower <= x <= upper, A_eq x = b_eq, A_le x <= b_le`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallLp {
    pub offset: f64,
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub eq: Vec<(Vec<f64>, f64)>,
    pub le: Vec<(Vec<f64>, f64)>,
}

impl SmallLp {
    /// Optimum over all basic feasible solutions: every choice of active
    /// inequality rows, basic columns, and nonbasic variables pinned at a
    /// finite bound is solved and kept if feasible. Exponential; for n <= ~10.
    pub fn vertex_max(&self) -> Option<f64> {
        let nv = self.objective.len();
        let mut best: Option<f64> = None;
        for active_mask in 0u32..(1 << self.le.len()) {
            let mut rows: Vec<&(Vec<f64>, f64)> = self.eq.iter().collect();
            rows.extend(self.le.iter().enumerate().filter(|(i, _)| active_mask & (1 << i) != 0).map(|(_, r)| r));
            let k = rows.len();
            if k > nv {
                continue;
            }
            for basis in combinations(nv, k) {
                let nonbasic: Vec<usize> = (0..nv).filter(|j| !basis.contains(j)).collect();
                let choices: Vec<Vec<f64>> = nonbasic
                    .iter()
                    .map(|&j| {
                        let mut v = vec![];
                        if self.lower[j].is_finite() {
                            v.push(self.lower[j]);
                        }
                        if self.upper[j].is_finite() && self.upper[j] != self.lower[j] {
                            v.push(self.upper[j]);
                        }
                        v
                    })
                    .collect();
                if choices.iter().any(|c| c.is_empty()) {
                    continue;
                }
                let mut counter = vec![0usize; nonbasic.len()];
                loop {
                    let mut x = vec![0.0; nv];
                    for (slot, &j) in nonbasic.iter().enumerate() {
                        x[j] = choices[slot][counter[slot]];
                    }
                    if let Some(xb) = solve_basis(&rows, &basis, &x) {
                        for (slot, &j) in basis.iter().enumerate() {
                            x[j] = xb[slot];
                        }
                        if self.feasible(&x) {
                            let val = self.offset + dot(&self.objective, &x);
                            best = Some(best.map_or(val, |b: f64| b.max(val)));
                        }
                    }
                    // odometer over bound choices
                    let mut pos = 0;
                    while pos < counter.len() {
                        counter[pos] += 1;
                        if counter[pos] < choices[pos].len() {
                            break;
                        }
                        counter[pos] = 0;
                        pos += 1;
                    }
                    if pos == counter.len() {
                        break;
                    }
                }
            }
        }
        best
    }

    fn feasible(&self, x: &[f64]) -> bool {
        let scale = 1e-10;
        x.iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (l, u))| *v >= l - scale && *v <= u + scale)
            && self.eq.iter().all(|(a, b)| (dot(a, x) - b).abs() <= scale)
            && self.le.iter().all(|(a, b)| dot(a, x) <= b + scale)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    rec(0, n, k, &mut vec![], &mut out);
    out
}

/// Solves the active rows for the basic columns given the nonbasic values in `x`.
fn solve_basis(rows: &[&(Vec<f64>, f64)], basis: &[usize], x: &[f64]) -> Option<Vec<f64>> {
    let k = basis.len();
    if k == 0 {
        return Some(vec![]);
    }
    let mut m: Vec<Vec<f64>> = rows
        .iter()
        .map(|(a, b)| {
            let rest: f64 = a.iter().enumerate().filter(|(j, _)| !basis.contains(j)).map(|(j, c)| c * x[j]).sum();
            let mut row: Vec<f64> = basis.iter().map(|&j| a[j]).collect();
            row.push(b - rest);
            row
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..=k {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    Some((0..k).map(|r| m[r][k] / m[r][r]).collect())
}

/// How [`brute_force_wc`] searches the set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SearchMode {
    /// Simplex grid of the given step (plus the nominal itself).
    Grid { step: f64 },
    /// Exact LP optimum by vertex enumeration; polyhedral sets only.
    Vertex,
}

/// Maximum of `q.f` over the set by grid search or vertex enumeration.
pub fn brute_force_wc(s: &Scenario, set: OracleSet, mode: SearchMode) -> Result<f64> {
    match mode {
        SearchMode::Vertex => {
            let lp = set
                .lp(s)
                .ok_or_else(|| Error::InvalidParameter("vertex mode needs a polyhedral set".into()))?;
            lp.vertex_max().ok_or_else(|| Error::InvalidParameter("empty polytope".into()))
        }
        SearchMode::Grid { step } => brute_force_grid(s, |q| set.contains(s.probs(), q), step),
    }
}

/// Maximum of `q.f` over `{q on the simplex grid of pitch step : member(q)} ∪ {p}`.
pub fn brute_force_grid<M: Fn(&[f64]) -> bool>(s: &Scenario, member: M, step: f64) -> Result<f64> {
    let n = s.len();
    if n > 6 {
        return Err(Error::InvalidParameter(format!("grid search is limited to n <= 6, got {n}")));
    }
    let limit = s.min_prob() / 4.0;
    if !(step > 0.0) || step > limit {
        return Err(Error::ResolutionTooCoarse { step, limit });
    }
    let units = (1.0 / step).round() as usize;
    let f = s.costs();
    let mut best: f64 = dot(s.probs(), f);
    let mut q = vec![0.0; n];
    let mut counts = vec![0usize; n];
    fn rec<M: Fn(&[f64]) -> bool>(
        idx: usize,
        left: usize,
        units: usize,
        counts: &mut [usize],
        q: &mut [f64],
        f: &[f64],
        member: &M,
        best: &mut f64,
    ) {
        let n = counts.len();
        if idx == n - 1 {
            counts[idx] = left;
            for (qi, &c) in q.iter_mut().zip(counts.iter()) {
                *qi = c as f64 / units as f64;
            }
            if member(q) {
                let v = dot(q, f);
                if v > *best {
                    *best = v;
                }
            }
            return;
        }
        for c in 0..=left {
            counts[idx] = c;
            rec(idx + 1, left - c, units, counts, q, f, member, best);
        }
    }
    rec(0, units, units, &mut counts, &mut q, f, &member, &mut best);
    Ok(best)
}

/// Difference-quotient estimate of a worst-case sensitivity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdEstimate {
    pub estimate: f64,
    pub quotients: Vec<f64>,
}

/// Estimates `lim (V(eps) - V(0)) / g(eps)` along a strictly decreasing
/// positive sequence, extrapolating the last two quotients under an error
/// model proportional to `g(eps)`.
///
/// With linear growth and a concave `V` the quotient is an average slope
/// and must not decrease as `eps` shrinks; a violation beyond `1e-6`
/// (relative) is reported as `NonMonotoneEstimates`. Square-root growth is
/// not checked, since no such ordering holds for it in general.
pub fn fd_sensitivity<V: FnMut(f64) -> Result<f64>>(v: V, growth: Growth, eps_seq: &[f64]) -> Result<FdEstimate> {
    let est = fd_extrapolate(v, growth, eps_seq)?;
    if growth == Growth::Linear {
        for (i, w) in est.quotients.windows(2).enumerate() {
            if w[1] < w[0] - 1e-6 * w[0].abs().max(1.0) {
                return Err(Error::NonMonotoneEstimates { position: i + 1, estimates: est.quotients });
            }
        }
    }
    Ok(est)
}

/// [`fd_sensitivity`] without the monotonicity check, for value functions
/// that are not concave in their parameter (penalty forms).
pub fn fd_extrapolate<V: FnMut(f64) -> Result<f64>>(mut v: V, growth: Growth, eps_seq: &[f64]) -> Result<FdEstimate> {
    if eps_seq.is_empty() || eps_seq.iter().any(|&e| !(e > 0.0)) || eps_seq.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("eps sequence must be positive and strictly decreasing".into()));
    }
    let v0 = v(0.0)?;
    let mut quotients = Vec::with_capacity(eps_seq.len());
    for &e in eps_seq {
        quotients.push((v(e)? - v0) / growth.apply(e));
    }
    let m = quotients.len();
    let estimate = if m == 1 {
        quotients[0]
    } else {
        let (g1, g2) = (growth.apply(eps_seq[m - 2]), growth.apply(eps_seq[m - 1]));
        let (q1, q2) = (quotients[m - 2], quotients[m - 1]);
        q2 + (q2 - q1) * g2 / (g1 - g2)
    };
    Ok(FdEstimate { estimate, quotients })
}

/// `10^{-from}, ..., 10^{-to}`.
pub fn decade_sequence(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|k| 10f64.powi(-k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub costs: Vec<f64>,
    pub probs: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub passed: bool,
    pub failures: usize,
    pub counterexample: Option<Counterexample>,
}

impl AxiomCheck {
    fn new() -> Self {
        Self { passed: true, failures: 0, counterexample: None }
    }

    fn fail(&mut self, s: &Scenario, detail: String) {
        self.passed = false;
        self.failures += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(Counterexample { costs: s.costs().to_vec(), probs: s.probs().to_vec(), detail });
        }
    }
}

/// Outcome of the randomized generalized-deviation checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub trials: usize,
    pub nonnegativity: AxiomCheck,
    pub zero_iff_constant: AxiomCheck,
    /// `S(b f) = b S(f)` for `b in {0.5, 2, 7}`.
    pub homogeneity: AxiomCheck,
    /// `S(b f) = b² S(f)`, the pattern of variance-type measures.
    pub quadratic_homogeneity: AxiomCheck,
    pub translation: AxiomCheck,
}

impl AxiomReport {
    /// All four generalized-deviation axioms hold.
    pub fn is_deviation_measure(&self) -> bool {
        self.nonnegativity.passed && self.zero_iff_constant.passed && self.homogeneity.passed && self.translation.passed
    }
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-8 * a.abs().max(b.abs()) + 1e-12
}

/// Random scenario: `n` uniform in `n_range`, costs uniform on `[-10, 10]`,
/// probabilities from a flat Dirichlet (normalised exponentials) or uniform.
pub fn random_scenario(rng: &mut SplitMix64, n_range: (usize, usize), uniform: bool) -> Scenario {
    let n = rng.range_inclusive(n_range.0, n_range.1);
    let costs: Vec<f64> = (0..n).map(|_| -10.0 + 20.0 * rng.next_f64()).collect();
    if uniform {
        return Scenario::uniform(costs).expect("valid random scenario");
    }
    let w: Vec<f64> = (0..n)
        .map(|_| loop {
            let e = rng.exponential(1.0);
            if e > 1e-3 {
                break e;
            }
        })
        .collect();
    let total: f64 = w.iter().sum();
    let probs = w.iter().map(|x| x / total).collect();
    Scenario::new(costs, Some(probs)).expect("valid random scenario")
}

/// Randomized check of the generalized-deviation axioms on `trials`
/// scenarios with `n` in `2..=6`.
pub fn deviation_axioms<M: Fn(&Scenario) -> f64>(measure: M, trials: usize, seed: u64) -> AxiomReport {
    let mut rng = SplitMix64::new(seed);
    let mut report = AxiomReport {
        trials,
        nonnegativity: AxiomCheck::new(),
        zero_iff_constant: AxiomCheck::new(),
        homogeneity: AxiomCheck::new(),
        quadratic_homogeneity: AxiomCheck::new(),
        translation: AxiomCheck::new(),
    };
    for _ in 0..trials {
        let s = random_scenario(&mut rng, (2, 6), false);
        let base = measure(&s);
        if !(base >= 0.0) {
            report.nonnegativity.fail(&s, format!("S(f) = {base}"));
        }
        let c = -10.0 + 20.0 * rng.next_f64();
        let constant = s.with_costs(vec![c; s.len()]).unwrap();
        let at_const = measure(&constant);
        if at_const != 0.0 {
            report.zero_iff_constant.fail(&constant, format!("S(const) = {at_const}"));
        }
        let mut bumped = vec![c; s.len()];
        let j = rng.range_inclusive(0, s.len() - 1);
        bumped[j] += 1e-3 * (1.0 + c.abs());
        let bumped = s.with_costs(bumped).unwrap();
        let at_bump = measure(&bumped);
        if !(at_bump > 0.0) {
            report.zero_iff_constant.fail(&bumped, format!("S(nonconstant) = {at_bump}"));
        }
        if !(base > 0.0) {
            report.zero_iff_constant.fail(&s, format!("S(nonconstant) = {base}"));
        }
        for beta in [0.5, 2.0, 7.0] {
            let scaled = s.with_costs(s.costs().iter().map(|f| beta * f).collect()).unwrap();
            let v = measure(&scaled);
            if !rel_close(v, beta * base) {
                report.homogeneity.fail(&s, format!("S({beta} f) = {v}, {beta} S(f) = {}", beta * base));
            }
            if !rel_close(v, beta * beta * base) {
                report
                    .quadratic_homogeneity
                    .fail(&s, format!("S({beta} f) = {v}, {beta}^2 S(f) = {}", beta * beta * base));
            }
        }
        for a in [-3.0, 0.0, 11.0] {
            let shifted = s.with_costs(s.costs().iter().map(|f| a + f).collect()).unwrap();
            let v = measure(&shifted);
            if !rel_close(v, base) {
                report.translation.fail(&s, format!("S({a} + f) = {v}, S(f) = {base}"));
            }
        }
    }
    report
}

/// Worst case over the KL ball for a two-atom scenario, solved directly
/// for the mass `t` on the costlier atom:
/// `t ln(t/p_hi) + (1-t) ln((1-t)/p_lo) = eps`, `t` in `[p_hi, 1)`.
pub fn kl_two_point_worst_case(s: &Scenario, eps: f64) -> Result<f64> {
    if s.len() != 2 {
        return Err(Error::InvalidParameter("two atoms required".into()));
    }
    let (hi_idx, lo_idx) = if s.costs()[1] >= s.costs()[0] { (1, 0) } else { (0, 1) };
    let (f_hi, f_lo) = (s.costs()[hi_idx], s.costs()[lo_idx]);
    let (p_hi, p_lo) = (s.probs()[hi_idx], s.probs()[lo_idx]);
    let kl = |t: f64| {
        let a = if t > 0.0 { t * (t / p_hi).ln() } else { 0.0 };
        let b = if t < 1.0 { (1.0 - t) * ((1.0 - t) / p_lo).ln() } else { 0.0 };
        a + b
    };
    if kl(1.0) <= eps {
        return Ok(f_hi);
    }
    let (mut lo, mut hi) = (p_hi, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kl(mid) < eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    Ok(f_lo + t * (f_hi - f_lo))
}

/// Exact worst case over the type-1 Wasserstein ball for a scalar
/// piecewise-linear cost, by minimising the dual
/// `lambda eps + Σ p_i max_z {f(z) - lambda |z - y_i|}` over its kinks.
/// Returns the value and the minimising `lambda`.
pub fn wasserstein_pl_dual(points: &[f64], probs: &[f64], cost: &PiecewiseLinearCost, eps: f64) -> (f64, f64) {
    let (lo, hi) = cost.domain();
    let slopes = cost.slopes();
    let mut lambda_min = 0.0f64;
    if hi == f64::INFINITY {
        lambda_min = lambda_min.max(*slopes.last().unwrap());
    }
    if lo == f64::NEG_INFINITY {
        lambda_min = lambda_min.max(-slopes[0]);
    }
    let mut knots: Vec<f64> = cost.breakpoints().iter().copied().filter(|b| *b >= lo && *b <= hi).collect();
    if lo.is_finite() {
        knots.push(lo);
    }
    if hi.is_finite() {
        knots.push(hi);
    }
    // the dual is convex piecewise linear; its kinks sit where two
    // candidate maximisers of some inner problem tie
    let mut lambdas = vec![lambda_min];
    for &y in points {
        let cands: Vec<f64> = knots.iter().copied().chain(std::iter::once(y)).collect();
        for (i, &a) in cands.iter().enumerate() {
            for &b in &cands[i + 1..] {
                let dd = (a - y).abs() - (b - y).abs();
                if dd != 0.0 {
                    let r = (cost.eval(a) - cost.eval(b)) / dd;
                    if r > lambda_min && r.is_finite() {
                        lambdas.push(r);
                    }
                }
            }
        }
    }
    let dual = |lambda: f64| -> f64 {
        let inner: f64 = points
            .iter()
            .zip(probs)
            .map(|(&y, p)| {
                let best = knots
                    .iter()
                    .chain(std::iter::once(&y))
                    .map(|&z| cost.eval(z) - lambda * (z - y).abs())
                    .fold(f64::NEG_INFINITY, f64::max);
                p * best
            })
            .sum();
        lambda * eps + inner
    };
    lambdas
        .into_iter()
        .map(|l| (dual(l), l))
        .fold((f64::INFINITY, lambda_min), |acc, cur| if cur.0 < acc.0 { cur } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(c: &[f64]) -> Scenario {
        Scenario::uniform(c.to_vec()).unwrap()
    }

    #[test]
    fn tv_vertex_example() {
        let v = brute_force_wc(&uni(&[1.0, 5.0, 3.0]), OracleSet::TotalVariation { eps: 0.2 }, SearchMode::Vertex).unwrap();
        assert!((v - 3.4).abs() < 1e-12);
        let v = brute_force_wc(&uni(&[1.0, 5.0, 3.0]), OracleSet::TotalVariation { eps: 1.0 }, SearchMode::Vertex).unwrap();
        assert!((v - 14.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn chi2_grid_example() {
        let v = brute_force_wc(&uni(&[0.0, 10.0]), OracleSet::ModifiedChi2 { eps: 0.02 }, SearchMode::Grid { step: 1e-4 }).unwrap();
        assert!((v - 6.0).abs() < 1e-3);
    }

    #[test]
    fn zero_radius_gives_mean() {
        let s = uni(&[0.0, 10.0]);
        let v = brute_force_grid(&s, |q| q == s.probs(), 0.01).unwrap();
        assert_eq!(v, 5.0);
    }

    #[test]
    fn coarse_grid_rejected() {
        let e = brute_force_wc(&uni(&[0.0, 10.0]), OracleSet::Kl { eps: 0.1 }, SearchMode::Grid { step: 0.2 }).unwrap_err();
        assert_eq!(e.code(), "ResolutionTooCoarse");
    }

    #[test]
    fn vertex_and_grid_agree_on_budgeted() {
        let s = uni(&[1.0, 5.0, 3.0]);
        let set = OracleSet::Budgeted { eps: 0.5 };
        let exact = brute_force_wc(&s, set, SearchMode::Vertex).unwrap();
        let grid = brute_force_wc(&s, set, SearchMode::Grid { step: 1.0 / 600.0 }).unwrap();
        assert!((exact - 4.0).abs() < 1e-12);
        assert!(grid <= exact + 1e-12 && grid >= exact - 4.0 / 600.0);
    }

    #[test]
    fn fd_on_linear_function() {
        let est = fd_sensitivity(|e| Ok(5.0 + 5.0 * e), Growth::Linear, &decade_sequence(2, 8)).unwrap();
        assert!((est.estimate - 5.0).abs() < 1e-6);
        let est = fd_sensitivity(|_| Ok(1.0), Growth::Sqrt, &decade_sequence(2, 8)).unwrap();
        assert_eq!(est.estimate, 0.0);
    }

    #[test]
    fn fd_flags_convex_value_function() {
        let e = fd_sensitivity(|e| Ok(e * e), Growth::Linear, &decade_sequence(1, 4)).unwrap_err();
        assert_eq!(e.code(), "NonMonotoneEstimates");
    }

    #[test]
    fn zero_measure_fails_zero_iff_constant() {
        let r = deviation_axioms(|_| 0.0, 50, 1);
        assert!(!r.zero_iff_constant.passed);
        assert!(r.nonnegativity.passed && r.homogeneity.passed && r.translation.passed);
    }

    #[test]
    fn kl_two_point_solve() {
        let v = kl_two_point_worst_case(&uni(&[0.0, 10.0]), 0.02).unwrap();
        assert!((v - 5.997).abs() < 1e-3);
    }

    #[test]
    fn wasserstein_dual_oracle_matches_first_order_inside_radius() {
        let cost = PiecewiseLinearCost::new(vec![15.0], vec![-10.0, 4.0], -120.0, (0.0, f64::INFINITY)).unwrap();
        for eps in [0.0, 1.0, 5.0] {
            let (v, _) = wasserstein_pl_dual(&[10.0, 20.0], &[0.5, 0.5], &cost, eps);
            assert!((v - (-85.0 + 10.0 * eps)).abs() < 1e-9, "{eps}: {v}");
        }
        // beyond the radius the mass at y = 10 is exhausted and the slope drops
        let (v, _) = wasserstein_pl_dual(&[10.0, 20.0], &[0.5, 0.5], &cost, 8.0);
        assert!(v < -85.0 + 80.0 - 1e-6);
    }
}
