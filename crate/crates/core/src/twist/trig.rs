use std::collections::BTreeMap;

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{Letter, MAX_INTEGRAL_LEN};
use crate::error::{QfError, Result};

type Coeff = Complex<BigRational>;

/// `Σ_k c_k e^{ikθ}` with exact Gaussian-rational coefficients. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    coeffs: BTreeMap<i64, Coeff>,
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_terms([(0, Coeff::new(c, BigRational::zero()))])
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    fn from_terms(terms: impl IntoIterator<Item = (i64, Coeff)>) -> Self {
        let mut p = Self::zero();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    fn add_term(&mut self, k: i64, c: Coeff) {
        let slot = self.coeffs.entry(k).or_insert_with(Coeff::zero);
        *slot = &*slot + c;
        if slot.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    /// `cos θ = (e^{iθ} + e^{-iθ}) / 2`.
    pub fn cos() -> Self {
        let h = Coeff::new(half(), BigRational::zero());
        Self::from_terms([(1, h.clone()), (-1, h)])
    }

    /// `sin θ = (e^{iθ} - e^{-iθ}) / 2i`.
    pub fn sin() -> Self {
        Self::from_terms([
            (1, Coeff::new(BigRational::zero(), -half())),
            (-1, Coeff::new(BigRational::zero(), half())),
        ])
    }

    pub fn neg(&self) -> Self {
        Self::from_terms(self.coeffs.iter().map(|(&k, c)| (k, -c.clone())))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (&k, c) in &other.coeffs {
            p.add_term(k, c.clone());
        }
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (&a, x) in &self.coeffs {
            for (&b, y) in &other.coeffs {
                p.add_term(a + b, x * y);
            }
        }
        p
    }

    pub fn coeff(&self, k: i64) -> Coeff {
        self.coeffs.get(&k).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Mean over a full period.
    pub fn constant_term(&self) -> Coeff {
        self.coeff(0)
    }

    pub fn degree(&self) -> u64 {
        self.coeffs.keys().map(|k| k.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|(&k, c)| self.coeff(-k) == c.conj())
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&k, c)| {
                let re = c.re.to_f64().unwrap_or(0.0);
                let im = c.im.to_f64().unwrap_or(0.0);
                Complex64::new(re, im) * Complex64::from_polar(1.0, k as f64 * theta)
            })
            .sum()
    }
}

/// Coordinate `v_ij` on the rotation `R(θ) = [[c, -s], [s, c]]`.
fn rotation_entry(i: usize, j: usize) -> TrigPoly {
    match (i, j) {
        (0, 0) | (1, 1) => TrigPoly::cos(),
        (0, 1) => TrigPoly::sin().neg(),
        _ => TrigPoly::sin(),
    }
}

/// Coordinate `v_ij` on the reflection `S(θ) = R(θ) diag(1, -1) = [[c, s], [s, -c]]`.
fn reflection_entry(i: usize, j: usize) -> TrigPoly {
    match (i, j) {
        (0, 0) => TrigPoly::cos(),
        (1, 1) => TrigPoly::cos().neg(),
        _ => TrigPoly::sin(),
    }
}

/// `∫_{O_2} v_{i_1 j_1} ⋯ v_{i_p j_p}` for the Haar measure, as the mean of the
/// constant terms over the rotation and reflection circles.
pub fn o2_integral(word: &[Letter]) -> Result<BigRational> {
    if word.len() > MAX_INTEGRAL_LEN {
        return Err(QfError::TooLarge(format!(
            "word length {} exceeds {MAX_INTEGRAL_LEN}",
            word.len()
        )));
    }
    if word.iter().any(|&(i, j)| i > 1 || j > 1) {
        return Err(QfError::IndexOutOfRange(format!("{word:?}")));
    }
    let (rot, refl) = word.iter().fold((TrigPoly::one(), TrigPoly::one()), |(r, s), &(i, j)| {
        (r.mul(&rotation_entry(i, j)), s.mul(&reflection_entry(i, j)))
    });
    let total = rot.constant_term() + refl.constant_term();
    debug_assert!(total.im.is_zero());
    Ok(total.re * half())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type Word = Vec<Letter>;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn double_factorial(n: i64) -> i64 {
        if n <= 0 {
            1
        } else {
            n * double_factorial(n - 2)
        }
    }

    /// `(1/2π) ∫ cos^a sin^b = (a-1)!!(b-1)!!/(a+b)!!` for even `a, b`, else 0.
    fn cos_sin_mean(a: i64, b: i64) -> BigRational {
        if a % 2 == 1 || b % 2 == 1 {
            return q(0, 1);
        }
        q(
            double_factorial(a - 1) * double_factorial(b - 1),
            double_factorial(a + b),
        )
    }

    /// Sign and `(cos, sin)` powers of the word on one circle.
    fn monomial(word: &Word, reflection: bool) -> (i64, i64, i64) {
        let (mut sign, mut a, mut b) = (1, 0, 0);
        for &(i, j) in word {
            match (i, j, reflection) {
                (0, 0, _) | (1, 1, false) => a += 1,
                (1, 1, true) => {
                    a += 1;
                    sign = -sign
                }
                (0, 1, false) => {
                    b += 1;
                    sign = -sign
                }
                _ => b += 1,
            }
        }
        (sign, a, b)
    }

    fn oracle(word: &Word) -> BigRational {
        let (sr, ar, br) = monomial(word, false);
        let (ss, as_, bs) = monomial(word, true);
        (cos_sin_mean(ar, br) * q(sr, 1) + cos_sin_mean(as_, bs) * q(ss, 1)) * half()
    }

    fn all_words(len: usize) -> Vec<Word> {
        (0..4usize.pow(len as u32))
            .map(|mut t| {
                (0..len)
                    .map(|_| {
                        let g = t % 4;
                        t /= 4;
                        (g / 2, g % 2)
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn basic_integrals() {
        assert_eq!(o2_integral(&[(0, 0)]).unwrap(), q(0, 1));
        assert_eq!(o2_integral(&[(0, 0), (0, 0)]).unwrap(), q(1, 2));
        assert_eq!(o2_integral(&[(0, 0), (1, 1)]).unwrap(), q(0, 1));
        assert_eq!(o2_integral(&[]).unwrap(), q(1, 1));
        assert!(o2_integral(&vec![(0, 0); 13]).is_err());
    }

    #[test]
    fn matches_double_factorial_oracle() {
        for len in 0..=6 {
            for w in all_words(len) {
                assert_eq!(o2_integral(&w).unwrap(), oracle(&w), "{w:?}");
            }
        }
    }

    #[test]
    fn trig_algebra() {
        let c = TrigPoly::cos();
        let s = TrigPoly::sin();
        let pythag = c.mul(&c).add(&s.mul(&s));
        assert_eq!(pythag, TrigPoly::one());
        assert!(c.mul(&s).is_real());
        let p = c.mul(&c).mul(&s);
        assert_eq!(p.degree(), 3);
        for theta in [0.1f64, 1.3, 2.9] {
            let direct = theta.cos().powi(2) * theta.sin();
            assert!((p.eval(theta).re - direct).abs() < 1e-14);
            assert!(p.eval(theta).im.abs() < 1e-14);
        }
        assert_eq!(c.add(&c.neg()), TrigPoly::zero());
    }
}
