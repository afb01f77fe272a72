//! Smooth divergence generators φ with φ(1) = φ'(1) = 0 and φ''(1) > 0.

use serde::Serialize;

/// A strictly convex, twice differentiable divergence generator.
///
/// `inverse_derivative` must be the inverse of `derivative` on the interior of
/// `inverse_domain()`; arguments outside the domain are clamped to its
/// boundary, which keeps the induced likelihood ratio `q_i / p_i` nonnegative.
pub trait PhiFunction {
    fn name(&self) -> &str;
    fn value(&self, z: f64) -> f64;
    fn derivative(&self, z: f64) -> f64;
    /// `[φ']⁻¹(ζ)` for ζ inside the domain.
    fn inverse_derivative(&self, zeta: f64) -> f64;
    /// Interval of ζ on which `[φ']⁻¹` is evaluated; outside it is clamped.
    fn inverse_domain(&self) -> (f64, f64);
    fn curvature_at_one(&self) -> f64;

    /// Likelihood ratio maximising `ζ z - φ(z)` over `z >= 0`.
    fn tilted_ratio(&self, zeta: f64) -> f64 {
        let (lo, hi) = self.inverse_domain();
        self.inverse_derivative(zeta.clamp(lo, hi))
    }
}

/// Built-in generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phi {
    /// Modified χ²: φ(z) = (z - 1)² / 2.
    ModifiedChi2,
    /// Relative entropy: φ(z) = z ln z - z + 1.
    Kl,
}

impl Phi {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "chi2" | "modified-chi2" => Some(Phi::ModifiedChi2),
            "kl" => Some(Phi::Kl),
            _ => None,
        }
    }
}

impl PhiFunction for Phi {
    fn name(&self) -> &str {
        match self {
            Phi::ModifiedChi2 => "chi2",
            Phi::Kl => "kl",
        }
    }

    fn value(&self, z: f64) -> f64 {
        match self {
            Phi::ModifiedChi2 => 0.5 * (z - 1.0) * (z - 1.0),
            Phi::Kl => {
                if z == 0.0 {
                    1.0
                } else {
                    z * z.ln() - z + 1.0
                }
            }
        }
    }

    fn derivative(&self, z: f64) -> f64 {
        match self {
            Phi::ModifiedChi2 => z - 1.0,
            Phi::Kl => z.ln(),
        }
    }

    fn inverse_derivative(&self, zeta: f64) -> f64 {
        match self {
            Phi::ModifiedChi2 => 1.0 + zeta,
            Phi::Kl => zeta.exp(),
        }
    }

    fn inverse_domain(&self) -> (f64, f64) {
        match self {
            Phi::ModifiedChi2 => (-1.0, f64::INFINITY),
            Phi::Kl => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn curvature_at_one(&self) -> f64 {
        1.0
    }
}

/// `Σ p_i φ(q_i / p_i)`.
pub fn divergence<P: PhiFunction + ?Sized>(phi: &P, p: &[f64], q: &[f64]) -> f64 {
    crate::numeric::ksum(p.iter().zip(q).map(|(&pi, &qi)| pi * phi.value(qi / pi)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalisation_conditions() {
        for phi in [Phi::ModifiedChi2, Phi::Kl] {
            assert_eq!(phi.value(1.0), 0.0);
            assert_eq!(phi.derivative(1.0), 0.0);
            assert!(phi.curvature_at_one() > 0.0);
            let h = 1e-4;
            let fd = (phi.value(1.0 + h) - 2.0 * phi.value(1.0) + phi.value(1.0 - h)) / (h * h);
            assert!((fd - phi.curvature_at_one()).abs() < 1e-6);
        }
    }

    #[test]
    fn inverse_derivative_round_trip_near_one() {
        for phi in [Phi::ModifiedChi2, Phi::Kl] {
            for k in -20..=20 {
                let z = 1.0 + 0.01 * k as f64;
                let back = phi.inverse_derivative(phi.derivative(z));
                assert!((back - z).abs() < 1e-10, "{} at {z}", phi.name());
            }
        }
    }

    #[test]
    fn chi2_ratio_clamps_at_zero() {
        assert_eq!(Phi::ModifiedChi2.tilted_ratio(-3.0), 0.0);
        assert_eq!(Phi::ModifiedChi2.tilted_ratio(0.5), 1.5);
    }
}
