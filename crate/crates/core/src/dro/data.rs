use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Feature rows with labels in `{+1, -1}`. Any intercept column is part of
/// the features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    features: Vec<Vec<f64>>,
    labels: Vec<f64>,
}

impl LabeledDataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::EmptyInput("dataset has no rows".into()));
        }
        if features.len() != labels.len() {
            return Err(Error::LengthMismatch { costs: features.len(), probs: labels.len() });
        }
        let d = features[0].len();
        if d == 0 {
            return Err(Error::EmptyInput("dataset has no features".into()));
        }
        if let Some(i) = features.iter().position(|row| row.len() != d) {
            return Err(Error::InvalidParameter(format!("row {i} has {} features, expected {d}", features[i].len())));
        }
        if let Some(i) = labels.iter().position(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::InvalidParameter(format!("label {i} is {}, expected +1 or -1", labels[i])));
        }
        if features.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("features must be finite".into()));
        }
        Ok(Self { features, labels })
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn d(&self) -> usize {
        self.features[0].len()
    }
}

/// `n` draws from a two-component exponential mixture. Each draw uses two
/// uniforms: the first picks the low-mean component when below `p_low`, the
/// second is mapped through `-mu ln(1 - u)`.
pub fn gen_mixture_demand(n: usize, mu_low: f64, mu_high: f64, p_low: f64, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptyInput("sample size must be positive".into()));
    }
    if !(mu_low > 0.0 && mu_high > 0.0) || !(0.0..=1.0).contains(&p_low) {
        return Err(Error::InvalidParameter(format!(
            "need positive means and p_low in [0, 1], got {mu_low}, {mu_high}, {p_low}"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    Ok((0..n)
        .map(|_| {
            let mu = if rng.next_f64() < p_low { mu_low } else { mu_high };
            rng.exponential(mu)
        })
        .collect())
}

/// Two unit-variance spherical Gaussian clusters centred at `±margin e_1`.
/// Per row: one uniform draws the label (`+1` when below one half), then `d`
/// standard normals; an all-ones intercept column is appended.
pub fn gen_synth_classification(n: usize, d: usize, margin: f64, seed: u64) -> Result<LabeledDataset> {
    if n < 2 || d < 1 {
        return Err(Error::InvalidParameter(format!("need n >= 2 and d >= 1, got n={n}, d={d}")));
    }
    if !margin.is_finite() {
        return Err(Error::InvalidParameter("margin must be finite".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let y = if rng.next_f64() < 0.5 { 1.0 } else { -1.0 };
        let mut row: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
        row[0] += y * margin;
        row.push(1.0);
        features.push(row);
        labels.push(y);
    }
    LabeledDataset::new(features, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_mixture_is_exponential() {
        let n = 20_000;
        let v = gen_mixture_demand(n, 10.0, 100.0, 1.0, 7).unwrap();
        let m = v.iter().sum::<f64>() / n as f64;
        assert!((m - 10.0).abs() < 3.0 * 10.0 / (n as f64).sqrt());
    }

    #[test]
    fn mixture_mean() {
        let v = gen_mixture_demand(100_000, 10.0, 100.0, 0.9, 3).unwrap();
        let m = v.iter().sum::<f64>() / v.len() as f64;
        assert!((m - 19.0).abs() < 1.0, "{m}");
    }

    #[test]
    fn deterministic_given_seed() {
        assert_eq!(gen_mixture_demand(5, 10.0, 100.0, 0.9, 42).unwrap(), gen_mixture_demand(5, 10.0, 100.0, 0.9, 42).unwrap());
        assert_eq!(gen_synth_classification(6, 2, 1.0, 9).unwrap(), gen_synth_classification(6, 2, 1.0, 9).unwrap());
    }

    #[test]
    fn classification_shape() {
        let ds = gen_synth_classification(10, 3, 2.0, 1).unwrap();
        assert_eq!((ds.n(), ds.d()), (10, 4));
        assert!(ds.features().iter().all(|r| r[3] == 1.0));
    }

    #[test]
    fn dataset_validation() {
        assert!(LabeledDataset::new(vec![vec![1.0]], vec![0.0]).is_err());
        assert!(LabeledDataset::new(vec![vec![1.0], vec![1.0, 2.0]], vec![1.0, -1.0]).is_err());
        assert!(LabeledDataset::new(vec![vec![1.0]], vec![1.0, -1.0]).is_err());
    }
}
