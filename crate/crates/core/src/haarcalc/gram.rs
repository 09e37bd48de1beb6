use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use super::{average_tp, multi_index};
use crate::error::{QfError, Result};
use crate::linalg::{self, CMat};
use crate::modelspace::MagicUnitaryModel;

const MAX_TUPLES: usize = 100_000;

/// Gram matrix of `ξ_I = K^{-1/2} ξ^{x_1}_{i_1 i_2} ⊗ … ⊗ ξ^{x_r}_{i_r i_1}` over
/// all `I ∈ [N]^r`, built from explicit tensor products.
pub fn gram_matrix(tuple: &[&MagicUnitaryModel]) -> CMat {
    let r = tuple.len();
    let n = tuple[0].n();
    let k = tuple[0].k();
    let count = n.pow(r as u32);
    let scale = Complex64::new(1.0 / (k as f64).sqrt(), 0.0);
    let vectors: Vec<DVector<Complex64>> = (0..count)
        .map(|t| {
            let idx = multi_index(t, n, r);
            let mut v = DVector::from_element(1, linalg::ONE);
            for s in 0..r {
                let factor = tuple[s].xi(idx[s], idx[(s + 1) % r]);
                v = v.kronecker(&factor);
            }
            v * scale
        })
        .collect();
    CMat::from_fn(count, count, |a, b| vectors[a].dotc(&vectors[b]))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramCheck {
    pub p: usize,
    pub r: usize,
    pub samples: usize,
    pub t_side: [f64; 2],
    pub gram_side: [f64; 2],
    pub abs_diff: f64,
    /// Smallest eigenvalue over all Gram matrices formed.
    pub min_gram_eigenvalue: f64,
}

/// Compares `K^{-p} Tr(T̂_p^r)`, with `T̂_p` the sample average, against
/// `K^{-r}` times the average of `Tr(G_r^p)` over all `S^r` ordered tuples of
/// the same samples.
pub fn gram_law_check(samples: &[MagicUnitaryModel], p: usize, r: usize) -> Result<GramCheck> {
    let first = samples
        .first()
        .ok_or_else(|| QfError::Invalid("empty sample set".into()))?;
    if samples.iter().any(|m| m.k() != first.k() || m.n() != first.n()) {
        return Err(QfError::Invalid("samples have mismatched K or N".into()));
    }
    if p == 0 || r == 0 {
        return Err(QfError::Invalid("p and r must be at least 1".into()));
    }
    let s = samples.len();
    let tuples = s
        .checked_pow(r as u32)
        .filter(|&t| t <= MAX_TUPLES)
        .ok_or_else(|| QfError::TooLarge(format!("S^r = {s}^{r} tuples")))?;
    let k = first.k() as f64;

    let t_hat = average_tp(samples, p)?;
    let t_side = linalg::trace(&linalg::mat_pow(t_hat.matrix(), r)) / k.powi(p as i32);

    let mut total = Complex64::new(0.0, 0.0);
    let mut min_eig = f64::INFINITY;
    for t in 0..tuples {
        let idx = multi_index(t, s, r);
        let tuple: Vec<&MagicUnitaryModel> = idx.iter().map(|&i| &samples[i]).collect();
        let g = gram_matrix(&tuple);
        let eig = g.clone().symmetric_eigenvalues();
        min_eig = eig.iter().copied().fold(min_eig, f64::min);
        total += linalg::trace(&linalg::mat_pow(&g, p));
    }
    let gram_side = total / tuples as f64 / k.powi(r as i32);
    Ok(GramCheck {
        p,
        r,
        samples: s,
        t_side: [t_side.re, t_side.im],
        gram_side: [gram_side.re, gram_side.im],
        abs_diff: (t_side - gram_side).norm(),
        min_gram_eigenvalue: min_eig,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::build_dihedral;
    use crate::modelspace::{enumerate_components, fourier_magic, sample_point};

    fn samples(count: usize, seed: u64) -> Vec<MagicUnitaryModel> {
        let g = build_dihedral(4).unwrap();
        let comps = enumerate_components(&g, 2).unwrap();
        (0..count)
            .map(|i| {
                let c = &comps[i % comps.len()];
                fourier_magic(&sample_point(c, seed + i as u64)).unwrap()
            })
            .collect()
    }

    #[test]
    fn single_sample_first_moment() {
        let s = samples(1, 3);
        let chk = gram_law_check(&s, 1, 1).unwrap();
        let direct: f64 = (0..s[0].n())
            .map(|i| linalg::trace(&s[0].projection(i, i)).re / 2.0)
            .sum::<f64>()
            / 2.0;
        assert!((chk.t_side[0] - direct).abs() < 1e-12);
        assert!(chk.abs_diff < 1e-12);
    }

    #[test]
    fn identity_on_matched_tuples() {
        let s = samples(3, 11);
        for p in 1..=3 {
            for r in 1..=2 {
                let chk = gram_law_check(&s, p, r).unwrap();
                assert!(chk.abs_diff < 1e-10, "p={p} r={r}: {chk:?}");
                assert!(chk.min_gram_eigenvalue > -1e-10);
            }
        }
    }

    #[test]
    fn rejects_mismatched_samples() {
        let a = samples(1, 0);
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![linalg::ONE, -linalg::ONE]));
        let b = fourier_magic(&crate::modelspace::QuasiFlatRep::new(2, vec![d]).unwrap()).unwrap();
        assert!(gram_law_check(&[a[0].clone(), b], 1, 1).is_err());
        assert!(gram_law_check(&[], 1, 1).is_err());
    }
}
