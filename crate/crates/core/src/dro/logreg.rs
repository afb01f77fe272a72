use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Growth, SensitivityReport, UncertaintyFamily};

use super::data::LabeledDataset;

const MAX_ITER: usize = 200_000;

/// `ln(1 + exp(-m))` without overflow.
fn softplus_neg(m: f64) -> f64 {
    if m > 0.0 {
        (-m).exp().ln_1p()
    } else {
        -m + m.exp().ln_1p()
    }
}

/// `1 / (1 + exp(m))`, the derivative weight of `softplus_neg`.
fn sigmoid_neg(m: f64) -> f64 {
    if m > 0.0 {
        let e = (-m).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + m.exp())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn margins(data: &LabeledDataset, w: &[f64]) -> Vec<f64> {
    data.features().iter().zip(data.labels()).map(|(x, y)| y * dot(x, w)).collect()
}

/// Average logistic loss `mean ln(1 + exp(-y w.x))`.
pub fn log_loss(data: &LabeledDataset, w: &[f64]) -> f64 {
    margins(data, w).into_iter().map(softplus_neg).sum::<f64>() / data.n() as f64
}

fn loss_and_grad(data: &LabeledDataset, w: &[f64]) -> (f64, Vec<f64>) {
    let n = data.n() as f64;
    let mut g = vec![0.0; w.len()];
    let mut loss = 0.0;
    for (x, y) in data.features().iter().zip(data.labels()) {
        let m = y * dot(x, w);
        loss += softplus_neg(m);
        let k = -y * sigmoid_neg(m) / n;
        for (gj, xj) in g.iter_mut().zip(x) {
            *gj += k * xj;
        }
    }
    (loss / n, g)
}

/// `eps ||w||_2 + mean log-loss`, the robust objective for an
/// infinite label-flip cost.
pub fn wasserstein_logreg_objective(data: &LabeledDataset, w: &[f64], eps: f64) -> f64 {
    eps * norm(w) + log_loss(data, w)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogregFit {
    pub weights: Vec<f64>,
    pub objective: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    /// Every training margin is positive: the infimum is not attained and
    /// the weights are only a point along a diverging path.
    pub separable: bool,
}

/// Unregularised fit by gradient descent with backtracking; stops once the
/// gradient norm is at most `tol`.
pub fn logreg_saa(data: &LabeledDataset, tol: f64) -> Result<LogregFit> {
    let fit = prox_descent(data, 0.0, tol)?;
    let separable = margins(data, &fit.0).iter().all(|&m| m > 0.0);
    Ok(LogregFit { objective: log_loss(data, &fit.0), weights: fit.0, grad_norm: fit.1, iterations: fit.2, separable })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogregWassersteinFit {
    pub weights: Vec<f64>,
    pub objective: f64,
    /// `w = 0` by the zero-subgradient condition.
    pub zero: bool,
    pub iterations: usize,
    /// `||w_SAA||_2`.
    pub sensitivity: SensitivityReport,
}

/// Minimises `eps ||w||_2 + mean log-loss` by proximal gradient steps
/// (block soft-thresholding) with backtracking, stopping when the
/// gradient-mapping norm is at most `tol`. Returns `w = 0` exactly when
/// `eps >= ||(1/2n) Σ y_i x_i||_2`.
pub fn logreg_wasserstein(data: &LabeledDataset, eps: f64, tol: f64) -> Result<LogregWassersteinFit> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::EpsOutOfRange { eps, lo: 0.0, hi: f64::INFINITY });
    }
    let saa = logreg_saa(data, tol)?;
    let sensitivity =
        SensitivityReport { value: norm(&saa.weights), family: UncertaintyFamily::WassersteinL1, growth: Growth::Linear };
    let n = data.n() as f64;
    let mut g0 = vec![0.0; data.d()];
    for (x, y) in data.features().iter().zip(data.labels()) {
        for (gj, xj) in g0.iter_mut().zip(x) {
            *gj += y * xj / (2.0 * n);
        }
    }
    if eps >= norm(&g0) {
        let w = vec![0.0; data.d()];
        return Ok(LogregWassersteinFit {
            objective: wasserstein_logreg_objective(data, &w, eps),
            weights: w,
            zero: true,
            iterations: 0,
            sensitivity,
        });
    }
    let (w, _, iterations) = if eps == 0.0 { (saa.weights.clone(), saa.grad_norm, saa.iterations) } else { prox_descent(data, eps, tol)? };
    Ok(LogregWassersteinFit { objective: wasserstein_logreg_objective(data, &w, eps), weights: w, zero: false, iterations, sensitivity })
}

/// Block soft-thresholding: prox of `t eps ||.||_2`.
fn shrink(v: &[f64], thresh: f64) -> Vec<f64> {
    let nv = norm(v);
    if nv <= thresh {
        vec![0.0; v.len()]
    } else {
        v.iter().map(|x| x * (1.0 - thresh / nv)).collect()
    }
}

/// Proximal gradient with backtracking on the smooth part and a doubling
/// trial step. Returns weights, final gradient-mapping norm and iterations.
fn prox_descent(data: &LabeledDataset, eps: f64, tol: f64) -> Result<(Vec<f64>, f64, usize)> {
    let mut w = vec![0.0; data.d()];
    let (mut loss, mut grad) = loss_and_grad(data, &w);
    let mut step = 1.0;
    let mut mapping = f64::INFINITY;
    for it in 0..MAX_ITER {
        loop {
            let trial: Vec<f64> = w.iter().zip(&grad).map(|(a, g)| a - step * g).collect();
            let next = shrink(&trial, step * eps);
            let diff: Vec<f64> = next.iter().zip(&w).map(|(a, b)| a - b).collect();
            let (nl, ng) = loss_and_grad(data, &next);
            let bound = loss + dot(&grad, &diff) + dot(&diff, &diff) / (2.0 * step);
            if nl <= bound + 1e-15 * loss.abs() || step < 1e-20 {
                mapping = norm(&diff) / step;
                w = next;
                loss = nl;
                grad = ng;
                break;
            }
            step *= 0.5;
        }
        if mapping <= tol {
            return Ok((w, mapping, it + 1));
        }
        step *= 2.0;
    }
    Err(Error::NonConvergence { iterations: MAX_ITER, grad_norm: mapping })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> LabeledDataset {
        LabeledDataset::new(vec![vec![1.0], vec![-1.0], vec![1.0], vec![-1.0]], vec![1.0, -1.0, 1.0, -1.0]).unwrap()
    }

    #[test]
    fn separable_toy() {
        let fit = logreg_saa(&toy(), 1e-8).unwrap();
        assert!(fit.weights[0] > 0.0);
        assert!(fit.objective < 2f64.ln());
        assert!(fit.separable);
        assert!(fit.grad_norm <= 1e-8);
    }

    #[test]
    fn intercept_only_all_positive() {
        let ds = LabeledDataset::new(vec![vec![1.0]; 5], vec![1.0; 5]).unwrap();
        let fit = logreg_saa(&ds, 1e-8).unwrap();
        assert!(fit.separable && fit.weights[0] > 10.0);
    }

    #[test]
    fn non_separable_gradient_small() {
        let ds = LabeledDataset::new(
            vec![vec![1.0, 1.0], vec![-1.0, 1.0], vec![0.5, 1.0], vec![-0.3, 1.0]],
            vec![1.0, 1.0, -1.0, -1.0],
        )
        .unwrap();
        let fit = logreg_saa(&ds, 1e-10).unwrap();
        assert!(!fit.separable);
        let (_, g) = loss_and_grad(&ds, &fit.weights);
        assert!(norm(&g) <= 1e-10);
    }

    #[test]
    fn toy_zero_threshold() {
        for eps in [0.5, 0.7, 3.0] {
            let fit = logreg_wasserstein(&toy(), eps, 1e-9).unwrap();
            assert!(fit.zero);
            assert_eq!(fit.weights, vec![0.0]);
        }
        let fit = logreg_wasserstein(&toy(), 0.4, 1e-9).unwrap();
        assert!(!fit.zero && fit.weights[0] > 0.0);
    }

    #[test]
    fn stable_softplus() {
        assert_eq!(softplus_neg(1000.0), 0.0);
        assert!((softplus_neg(-1000.0) - 1000.0).abs() < 1e-9);
        assert!((softplus_neg(0.0) - 2f64.ln()).abs() < 1e-15);
    }
}
