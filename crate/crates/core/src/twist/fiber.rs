use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{bidegree, twist_sign, Bicharacter, Bit2, Letter};
use crate::error::{QfError, Result};
use crate::linalg::{self, CMat};

const DEGENERACY_TOL: f64 = 1e-9;
const SUPPORT_TOL: f64 = 1e-12;
/// Relations must hold to this accuracy for a cocycle to be accepted.
pub const RELATION_TOL: f64 = 1e-12;

/// The point `±R(±θ) d^r` of `L₂ R(θ) L₂`, `d = diag(1, -1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Point {
    neg: bool,
    flip: bool,
    refl: bool,
}

/// `(-1)^neg d^q`.
#[derive(Clone, Copy, Debug)]
struct Diag {
    neg: bool,
    q: bool,
}

const L2: [Diag; 4] = [
    Diag { neg: false, q: false },
    Diag { neg: false, q: true },
    Diag { neg: true, q: false },
    Diag { neg: true, q: true },
];

impl Diag {
    /// `χ_c(l) = l_1^{c_1} l_2^{c_2}`.
    fn character(self, c: Bit2) -> f64 {
        let l1 = self.neg;
        let l2 = self.neg ^ self.q;
        let odd = (l1 && c[0] == 1) ^ (l2 && c[1] == 1);
        if odd {
            -1.0
        } else {
            1.0
        }
    }
}

impl Point {
    fn index(self) -> usize {
        4 * usize::from(self.neg) + 2 * usize::from(self.flip) + usize::from(self.refl)
    }

    fn from_index(t: usize) -> Self {
        Self {
            neg: t & 4 != 0,
            flip: t & 2 != 0,
            refl: t & 1 != 0,
        }
    }

    /// `l · p`, using `d R(φ) = R(-φ) d`.
    fn left(self, l: Diag) -> Self {
        Self {
            neg: self.neg ^ l.neg,
            flip: self.flip ^ l.q,
            refl: self.refl ^ l.q,
        }
    }

    fn right(self, l: Diag) -> Self {
        Self {
            neg: self.neg ^ l.neg,
            flip: self.flip,
            refl: self.refl ^ l.q,
        }
    }

    fn matrix(self, theta: f64) -> [[f64; 2]; 2] {
        let phi = if self.flip { -theta } else { theta };
        let s = if self.neg { -1.0 } else { 1.0 };
        let (c, si) = (phi.cos(), phi.sin());
        if self.refl {
            [[s * c, s * si], [s * si, -s * c]]
        } else {
            [[s * c, -s * si], [s * si, s * c]]
        }
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() || (2.0 * theta).sin().abs() < DEGENERACY_TOL {
        return Err(QfError::DegenerateTheta(theta));
    }
    Ok(())
}

/// The eight points `l R(θ) l'`, `l, l' ∈ L₂`, indexed as `±R(±θ) d^r`.
pub fn o2_fiber_points(theta: f64) -> Result<Vec<[[f64; 2]; 2]>> {
    check_theta(theta)?;
    Ok((0..8).map(|t| Point::from_index(t).matrix(theta)).collect())
}

/// Index of `l g l'` among the eight points, for `l = L2[a]`, `l' = L2[b]`.
fn translate(g: usize, a: usize, b: usize) -> usize {
    Point::from_index(g).left(L2[a]).right(L2[b]).index()
}

/// `f_{cd}(g) = (1/16) Σ_{l,l'} χ_c(l) χ_d(l') f(l g l')` on the eight points.
pub fn bidegree_project(theta: f64, f: &[f64], c: Bit2, d: Bit2) -> Result<Vec<f64>> {
    check_theta(theta)?;
    if f.len() != 8 {
        return Err(QfError::Invalid("a function on the 8 fiber points is required".into()));
    }
    Ok((0..8)
        .map(|g| {
            let mut acc = 0.0;
            for (a, &l) in L2.iter().enumerate() {
                for (b, &lp) in L2.iter().enumerate() {
                    acc += l.character(c) * lp.character(d) * f[translate(g, a, b)];
                }
            }
            acc / 16.0
        })
        .collect())
}

/// Coordinate `v_ij` at a point.
fn coordinate(m: &[[f64; 2]; 2], (i, j): Letter) -> f64 {
    m[i][j]
}

pub(super) const BITS: [Bit2; 4] = [[0, 0], [0, 1], [1, 0], [1, 1]];

/// `K[g, h]` with `(x · f)(g) = x(g) Σ_h K[g, h] f(h)` for `x` of bidegree
/// `(a, b)`; the twisted product multiplies `f_{cd}` by `σ⁻¹(a, c) σ(b, d)`.
fn sign_kernel(sigma: &Bicharacter, a: Bit2, b: Bit2) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(8, 8);
    for c in BITS {
        for d in BITS {
            let s = f64::from(sigma.inverse_eval(a, c) * sigma.eval(b, d));
            for g in 0..8 {
                for (ia, &l) in L2.iter().enumerate() {
                    for (ib, &lp) in L2.iter().enumerate() {
                        k[(g, translate(g, ia, ib))] += s * l.character(c) * lp.character(d) / 16.0;
                    }
                }
            }
        }
    }
    k
}

/// Left multiplication by the twisted monomial `u_w` on functions on the
/// eight points.
fn left_operator(theta: f64, sigma: &Bicharacter, word: &[Letter]) -> DMatrix<f64> {
    let (a, b) = bidegree(word);
    let eps = f64::from(twist_sign(word, sigma));
    let kernel = sign_kernel(sigma, a, b);
    DMatrix::from_fn(8, 8, |g, h| {
        let m = Point::from_index(g).matrix(theta);
        let v: f64 = word.iter().map(|&l| coordinate(&m, l)).product();
        eps * v * kernel[(g, h)]
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RelationResiduals {
    pub self_adjoint: f64,
    pub row_anticommute: f64,
    pub column_anticommute: f64,
    pub commute: f64,
    pub row_unitarity: f64,
    pub column_unitarity: f64,
}

impl RelationResiduals {
    pub fn max(&self) -> f64 {
        [
            self.self_adjoint,
            self.row_anticommute,
            self.column_anticommute,
            self.commute,
            self.row_unitarity,
            self.column_unitarity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Images `V_ij(θ)` of the generators on the four-point fiber through `R(θ)`.
#[derive(Clone, Debug)]
pub struct FiberModel {
    theta: f64,
    sigma: Bicharacter,
    /// Indices into the eight points, sorted.
    fiber: Vec<usize>,
    v: [CMat; 4],
}

/// Builds the left action of each generator on functions over the eight
/// points, takes the smallest set containing `R(θ)` that the actions keep
/// closed, and restricts to it. The set must have four points.
pub fn fiber_model(theta: f64, sigma: &Bicharacter) -> Result<FiberModel> {
    check_theta(theta)?;
    let gens: [Letter; 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let ops: Vec<DMatrix<f64>> = gens.iter().map(|&l| left_operator(theta, sigma, &[l])).collect();
    let kernels: Vec<DMatrix<f64>> = gens
        .iter()
        .map(|&l| {
            let (a, b) = bidegree(&[l]);
            sign_kernel(sigma, a, b)
        })
        .collect();

    let start = Point {
        neg: false,
        flip: false,
        refl: false,
    }
    .index();
    let mut fiber = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(g) = stack.pop() {
        for k in &kernels {
            for h in 0..8 {
                if k[(g, h)].abs() > SUPPORT_TOL && fiber.insert(h) {
                    stack.push(h);
                }
            }
        }
    }
    if fiber.len() != 4 {
        return Err(QfError::FiberFailure(format!(
            "closure of R(theta) has {} points, expected 4",
            fiber.len()
        )));
    }
    let fiber: Vec<usize> = fiber.into_iter().collect();
    let v = std::array::from_fn(|t| restrict(&ops[t], &fiber));
    Ok(FiberModel {
        theta,
        sigma: sigma.clone(),
        fiber,
        v,
    })
}

fn restrict(op: &DMatrix<f64>, fiber: &[usize]) -> CMat {
    let leak = (0..8)
        .filter(|h| !fiber.contains(h))
        .flat_map(|h| fiber.iter().map(move |&g| (g, h)))
        .map(|(g, h)| op[(g, h)].abs())
        .fold(0.0, f64::max);
    debug_assert!(leak < SUPPORT_TOL, "fiber not invariant: {leak}");
    CMat::from_fn(fiber.len(), fiber.len(), |r, c| {
        Complex64::new(op[(fiber[r], fiber[c])], 0.0)
    })
}

fn anticommutator(a: &CMat, b: &CMat) -> f64 {
    linalg::max_abs(&(a * b + b * a))
}

fn commutator(a: &CMat, b: &CMat) -> f64 {
    linalg::max_abs(&(a * b - b * a))
}

impl FiberModel {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma(&self) -> &Bicharacter {
        &self.sigma
    }

    /// Fiber points as matrices.
    pub fn fiber_points(&self) -> Vec<[[f64; 2]; 2]> {
        self.fiber
            .iter()
            .map(|&t| Point::from_index(t).matrix(self.theta))
            .collect()
    }

    pub fn v(&self, i: usize, j: usize) -> &CMat {
        &self.v[2 * i + j]
    }

    /// `V_{i_1 j_1} ⋯ V_{i_p j_p}`.
    pub fn word_operator(&self, word: &[Letter]) -> CMat {
        word.iter()
            .fold(linalg::identity(4), |acc, &(i, j)| acc * self.v(i, j))
    }

    /// Left multiplication by the twisted monomial, built directly from its
    /// sign and pointwise values rather than as a product.
    pub fn direct_operator(&self, word: &[Letter]) -> CMat {
        restrict(&left_operator(self.theta, &self.sigma, word), &self.fiber)
    }

    pub fn residuals(&self) -> RelationResiduals {
        let v = |i, j| self.v(i, j);
        let id = linalg::identity(4);
        let mut r = RelationResiduals::default();
        for i in 0..2 {
            for j in 0..2 {
                r.self_adjoint = r.self_adjoint.max(linalg::hermitian_residual(v(i, j)));
            }
            r.row_anticommute = r.row_anticommute.max(anticommutator(v(i, 0), v(i, 1)));
            r.column_anticommute = r.column_anticommute.max(anticommutator(v(0, i), v(1, i)));
            let row = v(i, 0) * v(i, 0) + v(i, 1) * v(i, 1);
            let col = v(0, i) * v(0, i) + v(1, i) * v(1, i);
            r.row_unitarity = r.row_unitarity.max(linalg::max_abs_diff(&row, &id));
            r.column_unitarity = r.column_unitarity.max(linalg::max_abs_diff(&col, &id));
        }
        r.commute = commutator(v(0, 0), v(1, 1)).max(commutator(v(0, 1), v(1, 0)));
        r
    }
}

/// First bicharacter, in index order and trying the standard orientation
/// before the reversed one, whose fiber model satisfies every relation at
/// three generic angles.
pub fn find_cocycle() -> Result<Bicharacter> {
    let thetas = [
        std::f64::consts::PI / 7.0,
        0.9,
        2.0 * std::f64::consts::PI / 3.0 + 0.1,
    ];
    for reversed in [false, true] {
        for index in 0..16 {
            let sigma = Bicharacter::from_index(index, reversed);
            let ok = thetas.iter().all(|&t| {
                fiber_model(t, &sigma).is_ok_and(|m| m.residuals().max() < RELATION_TOL)
            });
            if ok {
                return Ok(sigma);
            }
        }
    }
    Err(QfError::NoCocycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn matmul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
        let mut c = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        c
    }

    fn close(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).abs() < 1e-12))
    }

    fn l2_matrices() -> Vec<[[f64; 2]; 2]> {
        vec![
            [[1.0, 0.0], [0.0, 1.0]],
            [[1.0, 0.0], [0.0, -1.0]],
            [[-1.0, 0.0], [0.0, -1.0]],
            [[-1.0, 0.0], [0.0, 1.0]],
        ]
    }

    #[test]
    fn eight_points_closed_and_distinct() {
        let theta = PI / 6.0;
        let pts = o2_fiber_points(theta).unwrap();
        for a in 0..8 {
            for b in a + 1..8 {
                assert!(!close(&pts[a], &pts[b]));
            }
        }
        assert!((pts[0][0][0] - theta.cos()).abs() < 1e-15);
        assert!((pts[0][0][1] + theta.sin()).abs() < 1e-15);
        for p in &pts {
            for l in l2_matrices() {
                for lp in l2_matrices() {
                    let q = matmul(&matmul(&l, p), &lp);
                    assert!(pts.iter().any(|x| close(x, &q)));
                }
            }
        }
        // symbolic translation agrees with matrix products
        for g in 0..8 {
            for (a, l) in l2_matrices().iter().enumerate() {
                for (b, lp) in l2_matrices().iter().enumerate() {
                    // L2 order in this module: I, d, -I, -d
                    let q = matmul(&matmul(l, &pts[g]), lp);
                    assert!(close(&pts[translate(g, a, b)], &q));
                }
            }
        }
        assert!(o2_fiber_points(PI / 2.0).is_err());
        assert!(o2_fiber_points(0.0).is_err());
    }

    #[test]
    fn projections() {
        let theta = 0.7;
        let pts = o2_fiber_points(theta).unwrap();
        let ones = vec![1.0; 8];
        for c in BITS {
            for d in BITS {
                let p = bidegree_project(theta, &ones, c, d).unwrap();
                let expect = if c == [0, 0] && d == [0, 0] { 1.0 } else { 0.0 };
                assert!(p.iter().all(|x| (x - expect).abs() < 1e-15));
            }
        }
        for (i, j) in [(0, 0), (0, 1)] {
            let f: Vec<f64> = pts.iter().map(|m| m[i][j]).collect();
            let mut sum = [0.0; 8];
            for c in BITS {
                for d in BITS {
                    let p = bidegree_project(theta, &f, c, d).unwrap();
                    let mass = p.iter().map(|x| x.abs()).fold(0.0, f64::max);
                    let own = c == BITS[2 - i] && d == BITS[2 - j];
                    if !own {
                        assert!(mass < 1e-15, "({i},{j}) leaks into {c:?},{d:?}");
                    }
                    for (s, x) in sum.iter_mut().zip(&p) {
                        *s += x;
                    }
                }
            }
            assert!(sum.iter().zip(&f).all(|(a, b)| (a - b).abs() < 1e-14));
        }
    }

    #[test]
    fn cocycle_and_relations() {
        let sigma = find_cocycle().unwrap();
        for c in BITS {
            assert_eq!(sigma.eval([0, 0], c), 1);
            assert_eq!(sigma.eval(c, [0, 0]), 1);
        }
        let m = fiber_model(PI / 7.0, &sigma).unwrap();
        assert!(anticommutator(m.v(0, 0), m.v(0, 1)) < 1e-12);
        assert!(commutator(m.v(0, 0), m.v(1, 1)) < 1e-12);
        let r = m.residuals();
        assert!(r.max() < 1e-12, "{r:?}");
        assert_eq!(m.v(0, 0).nrows(), 4);
    }

    #[test]
    fn homomorphism_spot_check() {
        let sigma = find_cocycle().unwrap();
        let m = fiber_model(1.1, &sigma).unwrap();
        for word in [vec![(0, 0), (0, 1)], vec![(1, 0), (0, 1), (1, 1)], vec![(0, 1), (0, 1)]] {
            let diff = linalg::max_abs_diff(&m.direct_operator(&word), &m.word_operator(&word));
            assert!(diff < 1e-12, "{word:?}: {diff}");
        }
    }

    #[test]
    fn trivial_cocycle_fails() {
        let trivial = Bicharacter::from_index(0, false);
        assert!(fiber_model(0.8, &trivial).is_err());
    }
}
