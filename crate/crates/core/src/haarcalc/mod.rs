//! Moment machinery for quasi-flat models: the `T_p` matrices, truncated
//! integrals, the Gram-matrix law, exact word counts in the group algebra,
//! spectral diagnostics and growth.

mod gram;
mod mc;
mod words;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{QfError, Result};
use crate::linalg::{self, CMat, ZERO};
use crate::modelspace::MagicUnitaryModel;

pub use gram::{gram_law_check, gram_matrix, GramCheck};
pub use mc::{
    convolved_moment_estimates, moment_estimates, MomentEstimate, WeightedModel, MAX_CONVOLVED_DIM,
};
pub use words::{
    atom_at_one, cesaro_atom, growth_series, growth_series_by, kesten_support, word_moments_exact,
    GrowthSystem, MomentSequence,
};

pub use crate::linalg::haar_unitary;

/// Dense size guard on `N^p`.
pub const TP_MAX_DIM: usize = 4096;
const NORM_TOL: f64 = 1e-10;

/// `N^p × N^p` matrix with rows and columns addressed by multi-indices
/// `(i_1, …, i_p)`, `i_1` most significant.
///
/// Conjugation reverses both multi-indices, `conj T[I, J] = T[rev I, rev J]`,
/// so `T_p` is Hermitian only for symmetric models (`P_ij = P_ji`, as for
/// `K = 2`) and `p ≤ 2`, where reversal is a cyclic shift.
#[derive(Clone, Debug, PartialEq)]
pub struct TpMatrix {
    p: usize,
    n: usize,
    data: CMat,
}

impl TpMatrix {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.data
    }

    pub fn index(&self, multi: &[usize]) -> Result<usize> {
        if multi.len() != self.p || multi.iter().any(|&i| i >= self.n) {
            return Err(QfError::IndexOutOfRange(format!(
                "{multi:?} for p = {}, N = {}",
                self.p, self.n
            )));
        }
        Ok(multi.iter().fold(0, |acc, &i| acc * self.n + i))
    }

    pub fn entry(&self, rows: &[usize], cols: &[usize]) -> Result<Complex64> {
        Ok(self.data[(self.index(rows)?, self.index(cols)?)])
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.data)
    }
}

fn dense_dim(n: usize, p: usize) -> Result<usize> {
    n.checked_pow(p as u32)
        .filter(|&d| d <= TP_MAX_DIM)
        .ok_or_else(|| QfError::TooLarge(format!("N^p = {n}^{p} exceeds {TP_MAX_DIM}")))
}

fn multi_index(mut t: usize, n: usize, p: usize) -> Vec<usize> {
    let mut v = vec![0; p];
    for slot in v.iter_mut().rev() {
        *slot = t % n;
        t /= n;
    }
    v
}

/// `T_p(ξ)_{I,J} = (1/K) ∏_s <ξ_{i_s j_s}, ξ_{i_{s+1} j_{s+1}}>` (cyclic in `s`,
/// inner product linear in the right argument). `xi` is the row-major
/// `N × N` grid of vectors in `C^K`, each of norm 0 or 1.
pub fn tp_of_xi(xi: &[DVector<Complex64>], n: usize, p: usize) -> Result<TpMatrix> {
    if xi.len() != n * n || p == 0 {
        return Err(QfError::Invalid("xi must be an N x N grid and p >= 1".into()));
    }
    let k = xi[0].len();
    for v in xi {
        let norm = v.norm();
        if norm > NORM_TOL && (norm - 1.0).abs() > NORM_TOL {
            return Err(QfError::BadNorm { norm });
        }
    }
    let dim = dense_dim(n, p)?;
    let pairs = n * n;
    let ip = CMat::from_fn(pairs, pairs, |a, b| xi[a].dotc(&xi[b]));
    let inv_k = 1.0 / k as f64;
    let pair_of: Vec<Vec<usize>> = (0..dim).map(|t| multi_index(t, n, p)).collect();
    let data = CMat::from_fn(dim, dim, |r, c| {
        let (is, js) = (&pair_of[r], &pair_of[c]);
        let mut acc = Complex64::new(inv_k, 0.0);
        for s in 0..p {
            let t = (s + 1) % p;
            acc *= ip[(is[s] * n + js[s], is[t] * n + js[t])];
            if acc == ZERO {
                break;
            }
        }
        acc
    });
    Ok(TpMatrix { p, n, data })
}

pub fn tp_of_model(model: &MagicUnitaryModel, p: usize) -> Result<TpMatrix> {
    tp_of_xi(&model.xi_grid(), model.n(), p)
}

#[derive(Clone, Debug)]
pub struct TpIntegral {
    pub tp: TpMatrix,
    pub samples: Vec<MagicUnitaryModel>,
}

/// Average of `T_p(ξ^x)` over `S` sampled model points; sample `s` uses the
/// seed `derive_seed(seed, s)`, so the result does not depend on threading.
pub fn tp_integral<F>(sampler: F, p: usize, samples: usize, seed: u64) -> Result<TpIntegral>
where
    F: Fn(u64) -> Result<MagicUnitaryModel> + Sync,
{
    if samples == 0 {
        return Err(QfError::Invalid("at least one sample is required".into()));
    }
    let models: Vec<MagicUnitaryModel> = (0..samples as u64)
        .into_par_iter()
        .map(|s| sampler(linalg::derive_seed(seed, s)))
        .collect::<Result<_>>()?;
    let tp = average_tp(&models, p)?;
    Ok(TpIntegral {
        tp,
        samples: models,
    })
}

/// Mean of `T_p(ξ)` over the given models, summed in sample order.
pub fn average_tp(models: &[MagicUnitaryModel], p: usize) -> Result<TpMatrix> {
    let mats: Vec<TpMatrix> = models
        .par_iter()
        .map(|m| tp_of_model(m, p))
        .collect::<Result<_>>()?;
    let first = mats
        .first()
        .ok_or_else(|| QfError::Invalid("no samples".into()))?;
    let mut sum = CMat::zeros(first.data.nrows(), first.data.ncols());
    for m in &mats {
        sum += &m.data;
    }
    Ok(TpMatrix {
        p,
        n: first.n,
        data: sum / Complex64::new(mats.len() as f64, 0.0),
    })
}

/// `(T_p^r)_{I,J}`.
pub fn truncated_moment(tp: &TpMatrix, r: usize, rows: &[usize], cols: &[usize]) -> Result<Complex64> {
    if r == 0 {
        return Err(QfError::Invalid("r must be at least 1".into()));
    }
    let (i, j) = (tp.index(rows)?, tp.index(cols)?);
    Ok(linalg::mat_pow(&tp.data, r)[(i, j)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::build_dihedral;
    use crate::linalg::ONE;
    use crate::modelspace::{enumerate_components, fourier_magic, sample_point, QuasiFlatRep};

    fn sign_model() -> MagicUnitaryModel {
        let d = CMat::from_diagonal(&DVector::from_vec(vec![ONE, -ONE]));
        fourier_magic(&QuasiFlatRep::new(2, vec![d]).unwrap()).unwrap()
    }

    #[test]
    fn t1_diagonal_is_one_over_k() {
        let m = sign_model();
        let t1 = tp_of_model(&m, 1).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((t1.entry(&[i], &[j]).unwrap() - 0.5).norm() < 1e-15);
            }
        }
        assert!(t1.entry(&[2], &[0]).is_err());
    }

    #[test]
    fn matches_projection_traces() {
        // independent route: normalised traces of projection products
        let g = build_dihedral(4).unwrap();
        let comps = enumerate_components(&g, 2).unwrap();
        let model = fourier_magic(&sample_point(&comps[2], 9)).unwrap();
        let n = model.n();
        for p in 1..=3 {
            let tp = tp_of_model(&model, p).unwrap();
            for r in 0..n.pow(p as u32) {
                for c in 0..n.pow(p as u32) {
                    let (is, js) = (multi_index(r, n, p), multi_index(c, n, p));
                    let prod = (0..p).fold(linalg::identity(2), |acc, s| {
                        acc * model.projection(is[s], js[s])
                    });
                    let expect = linalg::trace(&prod) / 2.0;
                    assert!((tp.data[(r, c)] - expect).norm() < 1e-12);
                }
            }
            assert!(linalg::hermitian_residual(tp.matrix()) < 1e-12);
            assert!(tp.matrix().iter().all(|z| z.norm() <= 0.5 + 1e-12));
        }
    }

    #[test]
    fn zero_rows_kill_cycles() {
        let g = build_dihedral(4).unwrap();
        let comps = enumerate_components(&g, 2).unwrap();
        let model = fourier_magic(&sample_point(&comps[0], 1)).unwrap();
        let tp = tp_of_model(&model, 2).unwrap();
        // (0, 2) lies off the diagonal blocks, so its vector is zero
        for j in 0..4 {
            for i2 in 0..4 {
                for j2 in 0..4 {
                    assert_eq!(tp.entry(&[0, i2], &[2, j2]).unwrap(), ZERO);
                    let _ = j;
                }
            }
        }
    }

    #[test]
    fn bad_norms_rejected() {
        let v = DVector::from_vec(vec![Complex64::new(0.5, 0.0), ZERO]);
        assert!(matches!(
            tp_of_xi(&[v], 1, 1),
            Err(QfError::BadNorm { .. })
        ));
    }

    #[test]
    fn integral_is_deterministic_and_averages() {
        let g = build_dihedral(4).unwrap();
        let comps = enumerate_components(&g, 2).unwrap();
        let sampler = |s: u64| fourier_magic(&sample_point(&comps[2], s));
        let a = tp_integral(sampler, 2, 5, 42).unwrap();
        let b = tp_integral(sampler, 2, 5, 42).unwrap();
        assert_eq!(a.tp, b.tp);
        assert!(linalg::hermitian_residual(a.tp.matrix()) < 1e-12);
        let one = tp_integral(sampler, 2, 1, 42).unwrap();
        assert_eq!(one.tp, tp_of_model(&one.samples[0], 2).unwrap());
    }

    #[test]
    fn truncated_moment_powers() {
        let d = CMat::from_diagonal(&DVector::from_vec(vec![ONE, -ONE]));
        let m = fourier_magic(&QuasiFlatRep::new(2, vec![d.clone(), d]).unwrap()).unwrap();
        let t1 = tp_of_model(&m, 1).unwrap();
        assert_eq!(
            truncated_moment(&t1, 1, &[1], &[3]).unwrap(),
            t1.entry(&[1], &[3]).unwrap()
        );
        let direct: Complex64 = (0..4)
            .map(|mid| t1.entry(&[0], &[mid]).unwrap() * t1.entry(&[mid], &[1]).unwrap())
            .sum();
        assert!((truncated_moment(&t1, 2, &[0], &[1]).unwrap() - direct).norm() < 1e-15);
        // by hand: T_1 = diag(B, B) with B = (1/2)·ones(2), so T_1^2 = diag(B, B)
        // and Tr(T_1^2) = 2
        let sq = linalg::mat_pow(t1.matrix(), 2);
        assert!((linalg::trace(&sq) - 2.0).norm() < 1e-14);
        assert!((sq[(0, 1)] - 0.5).norm() < 1e-15);
        assert_eq!(sq[(0, 2)], ZERO);
    }
}
