use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::word_moments_exact;
use crate::error::{QfError, Result};
use crate::groups::FiniteGroup;
use crate::linalg::{self, CMat};
use crate::modelspace::{
    enumerate_components, fourier_magic, sample_point, MagicUnitaryModel, ModelComponent,
};
use crate::stationarity::solve_weights;

const WEIGHT_TOL: f64 = 1e-9;
/// Guard on the convolved representation dimension `K^r`.
pub const MAX_CONVOLVED_DIM: usize = 64;

/// A probability measure on finitely many components.
#[derive(Clone, Debug)]
pub struct WeightedModel {
    components: Vec<ModelComponent>,
    weights: Vec<f64>,
}

impl WeightedModel {
    pub fn new(components: Vec<ModelComponent>, weights: Vec<f64>) -> Result<Self> {
        if components.is_empty() || components.len() != weights.len() {
            return Err(QfError::WeightMismatch(format!(
                "{} components, {} weights",
                components.len(),
                weights.len()
            )));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| !(w >= 0.0)) || (total - 1.0).abs() > WEIGHT_TOL {
            return Err(QfError::WeightMismatch(format!(
                "weights must be nonnegative and sum to 1 (sum = {total})"
            )));
        }
        Ok(Self {
            components,
            weights,
        })
    }

    /// The minimum-norm stationary measure on the components of size `K`;
    /// errors when none exists.
    pub fn stationary(g: &FiniteGroup, k: usize) -> Result<Self> {
        let components = enumerate_components(g, k)?;
        let report = solve_weights(g, &components)?;
        let weights = report.weights.ok_or_else(|| {
            QfError::Invalid(format!("{} admits no stationary weights at K = {k}", g.name()))
        })?;
        Self::new(components, weights)
    }

    pub fn components(&self) -> &[ModelComponent] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Draws a component by weight, then a point of it.
    pub fn sample(&self, seed: u64) -> Result<MagicUnitaryModel> {
        let u: f64 = linalg::rng_from_seed(linalg::derive_seed(seed, 0)).random();
        let mut acc = 0.0;
        let mut pick = self.weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        for (i, &w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc && w > 0.0 {
                pick = i;
                break;
            }
        }
        let point = sample_point(&self.components[pick], linalg::derive_seed(seed, 1));
        fourier_magic(&point)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub p: usize,
    pub exact: f64,
    pub estimate: f64,
    pub stderr: f64,
}

impl MomentEstimate {
    /// `|estimate - exact|` in units of the standard error.
    pub fn z_score(&self) -> f64 {
        let diff = (self.estimate - self.exact).abs();
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff < 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// `tr(χ^p) / N^p` for `p = 1..=p_max`, with `χ = Σ_i V_ii` for the
/// convolution `V_ij = Σ P⁽¹⁾_{ik₁} ⊗ P⁽²⁾_{k₁k₂} ⊗ ⋯ ⊗ P⁽ʳ⁾_{k_{r-1}j}` and
/// `tr` the normalised trace on `M_{K^r}`.
fn diagonal_moments(models: &[MagicUnitaryModel], p_max: usize) -> Vec<f64> {
    let n = models[0].n();
    let mut blocks: Vec<CMat> = (0..n * n)
        .map(|t| models[0].projection(t / n, t % n))
        .collect();
    for m in &models[1..] {
        blocks = (0..n * n)
            .map(|t| {
                let (i, j) = (t / n, t % n);
                (0..n).fold(CMat::zeros(0, 0), |acc, k| {
                    let term = linalg::kron(&blocks[i * n + k], &m.projection(k, j));
                    if acc.nrows() == 0 {
                        term
                    } else {
                        acc + term
                    }
                })
            })
            .collect();
    }
    let chi = (0..n).fold(CMat::zeros(blocks[0].nrows(), blocks[0].ncols()), |acc, i| {
        acc + &blocks[i * n + i]
    });
    let dim = chi.nrows() as f64;
    let mut power = linalg::identity(chi.nrows());
    (1..=p_max)
        .map(|p| {
            power = &power * &chi;
            linalg::trace(&power).re / dim / (n as f64).powi(p as i32)
        })
        .collect()
}

/// Monte Carlo estimates of `(tr ⊗ ∫_X)(χ/N)^p` against the exact word counts.
/// Sample `s` uses `derive_seed(seed, s)`; the reduction runs in sample order.
pub fn moment_estimates(
    g: &FiniteGroup,
    model: &WeightedModel,
    p_max: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<MomentEstimate>> {
    convolved_moment_estimates(g, model, p_max, 1, samples, seed)
}

/// Estimates of the moments of `χ/N` under the `r`-fold convolution power of
/// the model state. Factor `t` of sample `s` uses `derive_seed(seed, s·r + t)`.
/// The exact column is the Haar value, which a stationary model matches for
/// every `r`.
pub fn convolved_moment_estimates(
    g: &FiniteGroup,
    model: &WeightedModel,
    p_max: usize,
    r: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<MomentEstimate>> {
    if samples < 2 {
        return Err(QfError::Invalid("at least two samples are required".into()));
    }
    if r == 0 {
        return Err(QfError::Invalid("r must be at least 1".into()));
    }
    let k = model.components()[0].k();
    if k.checked_pow(r as u32).is_none_or(|d| d > MAX_CONVOLVED_DIM) {
        return Err(QfError::TooLarge(format!(
            "K^r = {k}^{r} exceeds {MAX_CONVOLVED_DIM}"
        )));
    }
    let exact = word_moments_exact(g, p_max)?;
    let rows: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let tuple = (0..r as u64)
                .map(|t| model.sample(linalg::derive_seed(seed, s * r as u64 + t)))
                .collect::<Result<Vec<_>>>()?;
            Ok(diagonal_moments(&tuple, p_max))
        })
        .collect::<Result<_>>()?;
    let count = samples as f64;
    Ok((1..=p_max)
        .map(|p| {
            let mean = rows.iter().map(|r| r[p - 1]).sum::<f64>() / count;
            let var = rows.iter().map(|r| (r[p - 1] - mean).powi(2)).sum::<f64>() / (count - 1.0);
            MomentEstimate {
                p,
                exact: exact.values[p],
                estimate: mean,
                stderr: (var / count).sqrt(),
            }
        })
        .collect())
}
