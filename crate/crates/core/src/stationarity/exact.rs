//! Exact rational linear algebra and a two-phase simplex method (Bland's rule).

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<Q>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let (top, rest) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&mut a[i], &b[0])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&mut b[0], &a[r])
                };
                for (x, y) in top.iter_mut().zip(rest.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    let ncols = m.first().map_or(0, Vec::len);
    let mut w = m.to_vec();
    rref(&mut w, ncols).len()
}

/// Some solution of `M x = b` (free variables set to zero), if consistent.
pub fn solve_any(m: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let ncols = m.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Q>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Q::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][ncols].clone();
    }
    Some(x)
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    /// `y` with `yᵀA ≤ 0` and `yᵀb > 0`.
    Infeasible { farkas: Vec<Q> },
    Optimal { x: Vec<Q>, value: Q },
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Q {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(prow.iter()) {
                    *x -= &f * y;
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[Q]) -> Vec<Q> {
        (0..self.width)
            .map(|j| {
                let z = self
                    .basis
                    .iter()
                    .enumerate()
                    .fold(Q::zero(), |acc, (i, &bj)| acc + &cost[bj] * &self.rows[i][j]);
                &cost[j] - z
            })
            .collect()
    }

    /// Maximises `cost·x` over columns `allowed`; `false` when unbounded.
    fn optimise(&mut self, cost: &[Q], allowed: usize) -> bool {
        loop {
            let d = self.reduced_costs(cost);
            let Some(c) = (0..allowed).find(|&j| d[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if a.is_positive() {
                    let ratio = self.rhs(i) / a;
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

/// Maximises `cᵀx` subject to `A x = b`, `x ≥ 0`, in exact arithmetic.
pub fn simplex(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let width = n + m;
    let mut sign = vec![Q::one(); m];
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        if b[i].is_negative() {
            sign[i] = -Q::one();
        }
        let mut row: Vec<Q> = a[i].iter().map(|v| v * &sign[i]).collect();
        row.extend((0..m).map(|k| if k == i { Q::one() } else { Q::zero() }));
        row.push(&b[i] * &sign[i]);
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        width,
    };
    let phase1: Vec<Q> = (0..width)
        .map(|j| if j < n { Q::zero() } else { -Q::one() })
        .collect();
    t.optimise(&phase1, width);
    let value = t
        .basis
        .iter()
        .enumerate()
        .fold(Q::zero(), |acc, (i, &bj)| acc + &phase1[bj] * t.rhs(i));
    if value.is_negative() {
        // duals of the phase-one problem, mapped back to the unflipped rows
        let farkas = (0..m)
            .map(|k| {
                let y = t
                    .basis
                    .iter()
                    .enumerate()
                    .fold(Q::zero(), |acc, (i, &bj)| acc + &phase1[bj] * &t.rows[i][n + k]);
                -y * &sign[k]
            })
            .collect();
        return LpOutcome::Infeasible { farkas };
    }
    // drive zero-level artificials out of the basis, dropping redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut cost: Vec<Q> = c.to_vec();
    cost.extend((0..m).map(|_| Q::zero()));
    if !t.optimise(&cost, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &bj) in t.basis.iter().enumerate() {
        x[bj] = t.rhs(i).clone();
    }
    let value = dot(c, &x);
    LpOutcome::Optimal { x, value }
}

/// Checks `yᵀA ≤ 0` and `yᵀb > 0` exactly.
pub fn verify_farkas(a: &[Vec<Q>], b: &[Q], y: &[Q]) -> bool {
    if a.len() != y.len() || b.len() != y.len() {
        return false;
    }
    let ncols = a.first().map_or(0, Vec::len);
    let cols_ok = (0..ncols).all(|j| {
        let s = a.iter().zip(y).fold(Q::zero(), |acc, (row, yi)| acc + &row[j] * yi);
        !s.is_positive()
    });
    cols_ok && dot(y, b).is_positive()
}
