//! The twisted orthogonal group `O_2^{-1}`: central monomials, the sign
//! cocycle, a fiberwise 4×4 model over the circle, exact Haar integrals on
//! `O_2`, and the stationarity and idempotence checks for the model state.
//!
//! Generators are indexed from zero, so `(0, 1)` is `u_12`. A word is the
//! sequence of generators in a monomial, read left to right.

mod fiber;
mod trig;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QfError, Result};
use crate::linalg;

pub use fiber::{
    bidegree_project, fiber_model, find_cocycle, o2_fiber_points, FiberModel, RelationResiduals,
    RELATION_TOL,
};
pub use trig::{o2_integral, TrigPoly};

/// Generator `u_ij` as `(i, j)`.
pub type Letter = (usize, usize);
/// Element of `Z_2²`.
pub type Bit2 = [u8; 2];

pub const MAX_INTEGRAL_LEN: usize = 12;
pub const MAX_CONVOLVE_LEN: usize = 8;

/// Integer exponents `e_ij` of a compacted monomial `Π u_ij^{e_ij}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentMatrix {
    entries: Vec<Vec<u32>>,
}

impl ExponentMatrix {
    pub fn new(entries: Vec<Vec<u32>>) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|row| row.len() != n) {
            return Err(QfError::Invalid("exponent matrix must be square".into()));
        }
        Ok(Self { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.entries[i][j]
    }

    pub fn row_sums(&self) -> Vec<u32> {
        self.entries.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<u32> {
        (0..self.n())
            .map(|j| self.entries.iter().map(|r| r[j]).sum())
            .collect()
    }

    /// Row-major expansion into a word.
    pub fn word(&self) -> Vec<Letter> {
        let mut w = Vec::new();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                w.extend(std::iter::repeat_n((i, j), e as usize));
            }
        }
        w
    }
}

/// Row and column sums all share one parity.
pub fn is_central_monomial(e: &ExponentMatrix) -> bool {
    let mut parities = e.row_sums().into_iter().chain(e.column_sums()).map(|s| s % 2);
    match parities.next() {
        Some(first) => parities.all(|p| p == first),
        None => true,
    }
}

/// `σ(a, c) = (-1)^{aᵀ B c}` on `Z_2² × Z_2²`; when `reversed`, the arguments
/// are swapped before evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bicharacter {
    pub bits: [[u8; 2]; 2],
    pub reversed: bool,
}

impl Bicharacter {
    pub fn new(bits: [[u8; 2]; 2], reversed: bool) -> Self {
        Self {
            bits: bits.map(|r| r.map(|b| b & 1)),
            reversed,
        }
    }

    /// Index bits are `B_11 B_12 B_21 B_22`, most significant first.
    pub fn from_index(index: u8, reversed: bool) -> Self {
        let bit = |k: u8| (index >> k) & 1;
        Self::new([[bit(3), bit(2)], [bit(1), bit(0)]], reversed)
    }

    pub fn eval(&self, a: Bit2, c: Bit2) -> i8 {
        let (x, y) = if self.reversed { (c, a) } else { (a, c) };
        let mut e = 0;
        for r in 0..2 {
            for s in 0..2 {
                e ^= x[r] & self.bits[r][s] & y[s];
            }
        }
        if e == 0 {
            1
        } else {
            -1
        }
    }

    /// `σ⁻¹(a, c)`, which equals `σ(a, c)` for a sign-valued bicharacter.
    pub fn inverse_eval(&self, a: Bit2, c: Bit2) -> i8 {
        self.eval(a, c)
    }
}

fn basis(i: usize) -> Bit2 {
    let mut b = [0; 2];
    b[i] = 1;
    b
}

fn add(a: Bit2, b: Bit2) -> Bit2 {
    [a[0] ^ b[0], a[1] ^ b[1]]
}

/// Left and right `L₂`-degrees of a monomial.
pub fn bidegree(word: &[Letter]) -> (Bit2, Bit2) {
    word.iter().fold(([0; 2], [0; 2]), |(a, b), &(i, j)| {
        (add(a, basis(i)), add(b, basis(j)))
    })
}

/// Scalar in `x · y = σ⁻¹(a, c) σ(b, d) xy` for `x` of bidegree `(a, b)` and
/// `y` of bidegree `(c, d)`.
pub fn cross_sign(x: (Bit2, Bit2), y: (Bit2, Bit2), sigma: &Bicharacter) -> i8 {
    sigma.inverse_eval(x.0, y.0) * sigma.eval(x.1, y.1)
}

/// `ε(w)` with `u_{w_1} · ⋯ · u_{w_p} = ε(w) v_{w_1} ⋯ v_{w_p}`.
pub fn twist_sign(word: &[Letter], sigma: &Bicharacter) -> i8 {
    let mut deg = ([0; 2], [0; 2]);
    let mut sign = 1;
    for &(i, j) in word {
        let g = (basis(i), basis(j));
        sign *= cross_sign(deg, g, sigma);
        deg = (add(deg.0, g.0), add(deg.1, g.1));
    }
    sign
}

/// Haar value of a twisted monomial: `ε(w) ∫_{O_2} v_w`.
pub fn target_state(word: &[Letter], sigma: &Bicharacter) -> Result<BigRational> {
    Ok(o2_integral(word)? * BigRational::from_integer(twist_sign(word, sigma).into()))
}

/// Equispaced angles on `[0, π)`, offset by a third of a step so that no
/// angle is a multiple of `π/2`.
pub fn theta_grid(mq: usize) -> Vec<f64> {
    (0..mq)
        .map(|t| std::f64::consts::PI * (t as f64 + 1.0 / 3.0) / mq as f64)
        .collect()
}

/// `φ(w) = (1/Mq) Σ_θ (1/4) Tr V_w(θ)` with fiber models cached on the grid.
#[derive(Clone, Debug)]
pub struct ModelState {
    sigma: Bicharacter,
    fibers: Vec<FiberModel>,
}

impl ModelState {
    pub fn new(sigma: &Bicharacter, mq: usize) -> Result<Self> {
        if mq == 0 {
            return Err(QfError::GridTooCoarse("Mq must be positive".into()));
        }
        let fibers = theta_grid(mq)
            .par_iter()
            .map(|&t| fiber_model(t, sigma))
            .collect::<Result<_>>()?;
        Ok(Self {
            sigma: sigma.clone(),
            fibers,
        })
    }

    pub fn grid_size(&self) -> usize {
        self.fibers.len()
    }

    pub fn sigma(&self) -> &Bicharacter {
        &self.sigma
    }

    pub fn fibers(&self) -> &[FiberModel] {
        &self.fibers
    }

    /// Exact for words of length at most `Mq - 2`.
    pub fn eval(&self, word: &[Letter]) -> Result<Complex64> {
        if self.fibers.len() < word.len() + 2 {
            return Err(QfError::GridTooCoarse(format!(
                "Mq = {} for a word of length {}",
                self.fibers.len(),
                word.len()
            )));
        }
        if word.iter().any(|&(i, j)| i > 1 || j > 1) {
            return Err(QfError::IndexOutOfRange(format!("{word:?}")));
        }
        let total: Complex64 = self
            .fibers
            .iter()
            .map(|f| linalg::trace(&f.word_operator(word)) / 4.0)
            .sum();
        Ok(total / self.fibers.len() as f64)
    }
}

pub fn model_state(word: &[Letter], mq: usize, sigma: &Bicharacter) -> Result<Complex64> {
    ModelState::new(sigma, mq)?.eval(word)
}

/// `(φ * φ)(u_w) = Σ_k φ(u_{i_1 k_1} ⋯ u_{i_p k_p}) φ(u_{k_1 j_1} ⋯ u_{k_p j_p})`.
pub fn convolve_state<F>(phi: F, word: &[Letter]) -> Result<Complex64>
where
    F: Fn(&[Letter]) -> Result<Complex64>,
{
    let p = word.len();
    if p > MAX_CONVOLVE_LEN {
        return Err(QfError::TooLarge(format!(
            "word length {p} exceeds {MAX_CONVOLVE_LEN}"
        )));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for mid in 0..1usize << p {
        let k = |s: usize| (mid >> s) & 1;
        let left: Vec<Letter> = (0..p).map(|s| (word[s].0, k(s))).collect();
        let right: Vec<Letter> = (0..p).map(|s| (k(s), word[s].1)).collect();
        total += phi(&left)? * phi(&right)?;
    }
    Ok(total)
}

/// All `4^len` words of the given length, in lexicographic order.
pub fn all_words(len: usize) -> Vec<Vec<Letter>> {
    (0..4usize.pow(len as u32))
        .map(|t| {
            (0..len)
                .map(|s| {
                    let g = (t >> (2 * (len - 1 - s))) & 3;
                    (g >> 1, g & 1)
                })
                .collect()
        })
        .collect()
}

/// Renders a word as `u11 u12`, one-based.
pub fn format_word(word: &[Letter]) -> String {
    if word.is_empty() {
        return "1".into();
    }
    word.iter()
        .map(|&(i, j)| format!("u{}{}", i + 1, j + 1))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateRow {
    pub word: String,
    pub model_value: f64,
    pub target_value: f64,
    pub abs_error: f64,
}

/// Model state against `ε · ∫_{O_2}` on every word of length at most `maxlen`.
pub fn stationarity_rows(state: &ModelState, maxlen: usize) -> Result<Vec<StateRow>> {
    let words: Vec<Vec<Letter>> = (0..=maxlen).flat_map(all_words).collect();
    state_rows(state, &words)
}

pub fn state_rows(state: &ModelState, words: &[Vec<Letter>]) -> Result<Vec<StateRow>> {
    words
        .par_iter()
        .map(|w| {
            let model = state.eval(w)?;
            let target = target_state(w, state.sigma())?.to_f64().unwrap_or(f64::NAN);
            Ok(StateRow {
                word: format_word(w),
                model_value: model.re,
                target_value: target,
                abs_error: (model - target).norm(),
            })
        })
        .collect()
}

/// `(φ * φ)(w)` against `φ(w)` on every word of length at most `maxlen`.
pub fn idempotence_rows(state: &ModelState, maxlen: usize) -> Result<Vec<StateRow>> {
    let words: Vec<Vec<Letter>> = (0..=maxlen).flat_map(all_words).collect();
    words
        .par_iter()
        .map(|w| {
            let phi = state.eval(w)?;
            let conv = convolve_state(|x| state.eval(x), w)?;
            Ok(StateRow {
                word: format_word(w),
                model_value: conv.re,
                target_value: phi.re,
                abs_error: (conv - phi).norm(),
            })
        })
        .collect()
}
