use super::outcome::{Geometry, OutcomeSet};
use crate::error::{Result, WayError};
use crate::tol;

/// Probability distribution over an [`OutcomeSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist {
    outcomes: OutcomeSet,
    weights: Vec<f64>,
}

impl ProbDist {
    /// Weights within `-construction_tol` of zero are clamped to zero.
    pub fn new(outcomes: OutcomeSet, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != outcomes.len() {
            return Err(WayError::DimensionMismatch(format!(
                "{} weights for {} outcomes",
                weights.len(),
                outcomes.len()
            )));
        }
        let t = tol::construction();
        let mut clean = Vec::with_capacity(weights.len());
        for w in weights {
            if !w.is_finite() || w < -t {
                return Err(WayError::InvalidState(format!("negative or non-finite weight {w}")));
            }
            clean.push(w.max(0.0));
        }
        let total: f64 = clean.iter().sum();
        if (total - 1.0).abs() > t {
            return Err(WayError::InvalidState(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self {
            outcomes,
            weights: clean,
        })
    }

    /// Normalises nonnegative weights.
    pub fn from_unnormalized(outcomes: OutcomeSet, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(WayError::InvalidState("weights have no mass".into()));
        }
        Self::new(outcomes, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn point_mass(outcomes: OutcomeSet, at: usize) -> Self {
        let mut weights = vec![0.0; outcomes.len()];
        weights[at] = 1.0;
        Self { outcomes, weights }
    }

    pub fn uniform(outcomes: OutcomeSet) -> Self {
        let n = outcomes.len();
        Self {
            weights: vec![1.0 / n as f64; n],
            outcomes,
        }
    }

    pub fn outcomes(&self) -> &OutcomeSet {
        &self.outcomes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mean(&self) -> f64 {
        self.outcomes
            .outcomes()
            .iter()
            .zip(&self.weights)
            .map(|(o, w)| o.value * w)
            .sum()
    }

    /// Variance of the numeric value map.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.outcomes
            .outcomes()
            .iter()
            .zip(&self.weights)
            .map(|(o, w)| w * (o.value - mean).powi(2))
            .sum()
    }

    /// Smallest number of consecutive cells (wrapping for cyclic geometry)
    /// carrying mass at least `1 - eps`.
    pub fn overall_width(&self, eps: f64) -> usize {
        assert!(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1), got {eps}");
        let n = self.weights.len();
        let target = 1.0 - eps - tol::construction();
        let cyclic = matches!(self.outcomes.geometry(), Geometry::Cyclic(_));
        let len = if cyclic { 2 * n } else { n };
        let mut prefix = vec![0.0; len + 1];
        for i in 0..len {
            prefix[i + 1] = prefix[i] + self.weights[i % n];
        }
        let mut best = n;
        for start in 0..n {
            // smallest end with prefix[end] - prefix[start] >= target
            let max_end = if cyclic { start + n } else { n };
            let (mut lo, mut hi) = (start + 1, max_end);
            if prefix[hi] - prefix[start] < target {
                continue;
            }
            while lo < hi {
                let mid = (lo + hi) / 2;
                if prefix[mid] - prefix[start] >= target {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            best = best.min(lo - start);
        }
        best
    }

    /// Cyclic convolution `(self * other)(k) = Σ_j self(j) other(k - j)`.
    pub fn convolve_cyclic(&self, other: &ProbDist) -> Result<ProbDist> {
        let n = self.weights.len();
        match (self.outcomes.geometry(), other.outcomes.geometry()) {
            (Geometry::Cyclic(a), Geometry::Cyclic(b)) if a == b => {}
            _ => {
                return Err(WayError::OutcomeMismatch(
                    "cyclic convolution needs matching cyclic geometries".into(),
                ))
            }
        }
        let mut w = vec![0.0; n];
        for (j, &a) in self.weights.iter().enumerate() {
            for (l, &b) in other.weights.iter().enumerate() {
                w[(j + l) % n] += a * b;
            }
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        ProbDist::new(self.outcomes.clone(), w)
    }
}
