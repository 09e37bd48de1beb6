//! Exact arithmetic in cyclotomic fields `Q(ζ_n)`.
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^{φ(n)-1}` after
//! reduction modulo the cyclotomic polynomial `Φ_n`, so two elements are equal
//! exactly when their coefficient vectors are equal. Character values of the
//! monomial representations built in [`crate::groups`] live here, which lets
//! stationarity and orbit-sum identities be checked with zero rounding.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Integer coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_poly(n: u32) -> Vec<i64> {
    assert!(n >= 1);
    // x^n - 1
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = poly_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let lead = den[dn];
    debug_assert!(lead == 1);
    let qlen = num.len() - dn;
    let mut q = vec![0i64; qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dn] / lead;
        q[k] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[k + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

pub fn euler_phi(n: u32) -> u32 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u32
}

/// An element of `Q(ζ_order)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclo {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclo {
    pub fn zero(order: u32) -> Self {
        let phi = euler_phi(order) as usize;
        Cyclo {
            order,
            coeffs: vec![BigRational::zero(); phi],
        }
    }

    pub fn from_rational(order: u32, q: BigRational) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = q;
        z
    }

    pub fn from_int(order: u32, v: i64) -> Self {
        Self::from_rational(order, BigRational::from_integer(BigInt::from(v)))
    }

    /// `ζ_order^k`.
    pub fn root(order: u32, k: i64) -> Self {
        let e = k.rem_euclid(order as i64) as usize;
        let mut raw = vec![BigRational::zero(); e + 1];
        raw[e] = BigRational::one();
        Self::reduce(order, raw)
    }

    /// Sum of `ζ^{k}` over the given exponents.
    pub fn sum_of_roots(order: u32, exps: impl IntoIterator<Item = i64>) -> Self {
        let mut raw = vec![BigRational::zero(); order as usize];
        for k in exps {
            let e = k.rem_euclid(order as i64) as usize;
            raw[e] += BigRational::one();
        }
        Self::reduce(order, raw)
    }

    fn reduce(order: u32, mut raw: Vec<BigRational>) -> Self {
        let phi_poly = cyclotomic_poly(order);
        let deg = phi_poly.len() - 1;
        while raw.len() > deg {
            let top = raw.len() - 1;
            let c = raw.pop().unwrap();
            if !c.is_zero() {
                let shift = top - deg;
                for (j, &pj) in phi_poly.iter().enumerate().take(deg) {
                    let pj = BigRational::from_integer(BigInt::from(pj));
                    raw[shift + j] -= &c * pj;
                }
            }
        }
        raw.resize(deg, BigRational::zero());
        Cyclo { order, coeffs: raw }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Re-express in `Q(ζ_new_order)`; `new_order` must be a multiple of the current order.
    pub fn lift(&self, new_order: u32) -> Self {
        assert!(new_order.is_multiple_of(self.order), "lift target must be a multiple");
        if new_order == self.order {
            return self.clone();
        }
        let step = (new_order / self.order) as usize;
        let mut raw = vec![BigRational::zero(); (self.coeffs.len().max(1) - 1) * step + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            raw[j * step] = c.clone();
        }
        Self::reduce(new_order, raw)
    }

    fn aligned(a: &Cyclo, b: &Cyclo) -> (Cyclo, Cyclo) {
        if a.order == b.order {
            (a.clone(), b.clone())
        } else {
            let l = a.order.lcm(&b.order);
            (a.lift(l), b.lift(l))
        }
    }

    pub fn add(&self, other: &Cyclo) -> Cyclo {
        let (mut a, b) = Self::aligned(self, other);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, other: &Cyclo) -> Cyclo {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, q: &BigRational) -> Cyclo {
        Cyclo {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn mul(&self, other: &Cyclo) -> Cyclo {
        let (a, b) = Self::aligned(self, other);
        let mut raw = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len()];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                raw[i + j] += x * y;
            }
        }
        Self::reduce(a.order, raw)
    }

    pub fn pow(&self, r: u32) -> Cyclo {
        let mut acc = Cyclo::from_int(self.order, 1);
        for _ in 0..r {
            acc = acc.mul(self);
        }
        acc
    }

    /// Galois automorphism `ζ ↦ ζ^k` (k coprime to the order).
    pub fn galois(&self, k: i64) -> Cyclo {
        let n = self.order as i64;
        debug_assert!(k.rem_euclid(n).gcd(&n) == 1 || n == 1);
        let mut raw = vec![BigRational::zero(); self.order as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            let e = (j as i64 * k).rem_euclid(n) as usize;
            raw[e] += c;
        }
        Self::reduce(self.order, raw)
    }

    pub fn conj(&self) -> Cyclo {
        self.galois(-1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `Some(q)` when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs.first().cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let n = self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                let ang = 2.0 * std::f64::consts::PI * j as f64 / n;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), ang)
            })
            .sum()
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            let body = match (j, mag.is_one()) {
                (0, _) => format!("{}", mag),
                (_, true) => format!("z{}^{}", self.order, j),
                (_, false) => format!("{}*z{}^{}", mag, self.order, j),
            };
            terms.push((sign, body));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (sign, body)) in terms.iter().enumerate() {
            match (i, *sign) {
                (0, "-") => write!(f, "-{}", body)?,
                (0, _) => write!(f, "{}", body)?,
                (_, s) => write!(f, " {} {}", s, body)?,
            }
        }
        Ok(())
    }
}
