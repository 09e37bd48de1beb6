use nalgebra::DVector;
use num_complex::Complex64;

use super::QuasiFlatRep;
use crate::error::{QfError, Result};
use crate::linalg::{self, root_of_unity, CMat, ZERO};

/// A quasi-flat model in the magic-unitary picture: an `N × N` array, `N = KM`,
/// whose `(i,a),(j,b)` entry is the projection onto `ξ^{(i)}_{ab}` when `i = j`
/// and zero otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct MagicUnitaryModel {
    k: usize,
    m: usize,
    // [(i * K + a) * K + b]
    xi: Vec<DVector<Complex64>>,
}

impl MagicUnitaryModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.k * self.m
    }

    pub fn block_xi(&self, i: usize, a: usize, b: usize) -> &DVector<Complex64> {
        &self.xi[(i * self.k + a) * self.k + b]
    }

    /// `ξ` at a global index pair; zero vector off the diagonal blocks.
    pub fn xi(&self, row: usize, col: usize) -> DVector<Complex64> {
        let (i, a) = (row / self.k, row % self.k);
        let (j, b) = (col / self.k, col % self.k);
        if i == j {
            self.block_xi(i, a, b).clone()
        } else {
            DVector::from_element(self.k, ZERO)
        }
    }

    /// Row-major `N × N` grid of vectors.
    pub fn xi_grid(&self) -> Vec<DVector<Complex64>> {
        let n = self.n();
        (0..n * n).map(|t| self.xi(t / n, t % n)).collect()
    }

    pub fn projection(&self, row: usize, col: usize) -> CMat {
        linalg::projection(&self.xi(row, col))
    }

    /// Largest deviation from `P² = P = P*` and from row and column sums `I`.
    pub fn magic_residual(&self) -> f64 {
        let n = self.n();
        let id = linalg::identity(self.k);
        let mut worst = 0.0f64;
        for r in 0..n {
            let mut row = CMat::zeros(self.k, self.k);
            let mut col = CMat::zeros(self.k, self.k);
            for c in 0..n {
                let p = self.projection(r, c);
                worst = worst
                    .max(linalg::max_abs_diff(&(&p * &p), &p))
                    .max(linalg::hermitian_residual(&p));
                row += p;
                col += self.projection(c, r);
            }
            worst = worst
                .max(linalg::max_abs_diff(&row, &id))
                .max(linalg::max_abs_diff(&col, &id));
        }
        worst
    }

    /// Largest deviation of `P^{(i)}_{ab}` from `P^{(i)}_{0,(b-a) mod K}`.
    pub fn circulant_residual(&self) -> f64 {
        let k = self.k;
        let mut worst = 0.0f64;
        for i in 0..self.m {
            for a in 0..k {
                for b in 0..k {
                    let p = linalg::projection(self.block_xi(i, a, b));
                    let q = linalg::projection(self.block_xi(i, 0, (b + k - a) % k));
                    worst = worst.max(linalg::max_abs_diff(&p, &q));
                }
            }
        }
        worst
    }

    /// `Σ_d w^d P^{(i)}_{0d}`, which recovers `ρ(g_i)`.
    pub fn reconstruct(&self, i: usize) -> CMat {
        (0..self.k).fold(CMat::zeros(self.k, self.k), |acc, d| {
            acc + linalg::projection(self.block_xi(i, 0, d)) * root_of_unity(self.k, d as i64)
        })
    }
}

/// `P^{(i)}_{ab} = (1/K) Σ_k w^{k(a-b)} ρ(g_i)^k`, the spectral projection of
/// `ρ(g_i)` at `w^{b-a}`, stored through a unit vector spanning its range.
pub fn fourier_magic(rep: &QuasiFlatRep) -> Result<MagicUnitaryModel> {
    let k = rep.k();
    let m = rep.generators().len();
    let mut xi = Vec::with_capacity(m * k * k);
    for u in rep.generators() {
        let powers: Vec<CMat> = (0..k).map(|p| linalg::mat_pow(u, p)).collect();
        let spectral: Vec<DVector<Complex64>> = (0..k)
            .map(|d| {
                // projection at w^d
                let p = powers
                    .iter()
                    .enumerate()
                    .fold(CMat::zeros(k, k), |acc, (t, up)| {
                        acc + up * root_of_unity(k, -((t * d) as i64))
                    })
                    / Complex64::new(k as f64, 0.0);
                unit_range_vector(&p)
            })
            .collect::<Result<_>>()?;
        for a in 0..k {
            for b in 0..k {
                xi.push(spectral[(b + k - a) % k].clone());
            }
        }
    }
    Ok(MagicUnitaryModel { k, m, xi })
}

fn unit_range_vector(p: &CMat) -> Result<DVector<Complex64>> {
    let (best, norm) = (0..p.ncols())
        .map(|c| (c, p.column(c).norm()))
        .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if norm < 1e-6 {
        return Err(QfError::NotQuasiFlat("empty spectral projection".into()));
    }
    let v: DVector<Complex64> = p.column(best).into_owned() / Complex64::new(norm, 0.0);
    if linalg::max_abs_diff(&linalg::projection(&v), p) > 1e-10 {
        return Err(QfError::NotQuasiFlat("spectral projection of rank > 1".into()));
    }
    Ok(v)
}
