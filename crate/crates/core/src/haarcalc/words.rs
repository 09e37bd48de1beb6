use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{QfError, Result};
use crate::groups::FiniteGroup;

const MAX_GROUP: usize = 10_000;
const MAX_P: usize = 5_000;
const MOMENT_TOL: f64 = 1e-12;
/// Threshold for `lim sup m_p^{1/p}` to count as reaching 1.
const KESTEN_THRESHOLD: f64 = 0.99;

/// Moments `m_0, …, m_P` of the spectral measure of `χ/N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentSequence {
    pub n: usize,
    pub values: Vec<f64>,
    /// Exact moments as `"num/den"` strings, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<String>>,
    /// Identity-word counts, when computed from a group.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<String>>,
}

impl MomentSequence {
    /// Checks `m_0 = 1` and `|m_p| ≤ 1`.
    pub fn from_values(values: Vec<f64>, n: usize) -> Result<Self> {
        match values.first() {
            Some(m0) if (m0 - 1.0).abs() <= MOMENT_TOL => {}
            _ => return Err(QfError::Invalid("moment sequence must start with m_0 = 1".into())),
        }
        if let Some(bad) = values.iter().find(|v| !(v.abs() <= 1.0 + MOMENT_TOL)) {
            return Err(QfError::Invalid(format!("moment {bad} outside [-1, 1]")));
        }
        Ok(Self {
            n,
            values,
            exact: None,
            counts: None,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_order(&self) -> usize {
        self.values.len().saturating_sub(1)
    }
}

/// `m_p = N^{-p} · #{length-p words over {g_i^k} equal to e}`, by convolution
/// in the group algebra. Letters are counted with multiplicity, so the
/// identity letter occurs once per generator.
pub fn word_moments_exact(g: &FiniteGroup, p_max: usize) -> Result<MomentSequence> {
    if g.order() > MAX_GROUP {
        return Err(QfError::TooLarge(format!("|G| = {} exceeds {MAX_GROUP}", g.order())));
    }
    if p_max > MAX_P {
        return Err(QfError::TooLarge(format!("p_max = {p_max} exceeds {MAX_P}")));
    }
    let k = g.gen_order();
    let mut letters: BTreeMap<usize, u64> = BTreeMap::new();
    for &x in g.generators() {
        for e in 0..k {
            *letters.entry(g.pow(x, e as i64)).or_default() += 1;
        }
    }
    let n = k * g.generators().len();
    let big_n = BigUint::from(n);

    let mut dist = vec![BigUint::zero(); g.order()];
    dist[g.identity()] = BigUint::one();
    let mut counts = vec![BigUint::one()];
    let mut exact = vec![BigRational::one()];
    let mut denom = BigUint::one();
    for _ in 1..=p_max {
        let mut next = vec![BigUint::zero(); g.order()];
        for (h, c) in dist.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (&a, &mult) in &letters {
                next[g.mul(h, a)] += c * mult;
            }
        }
        dist = next;
        denom *= &big_n;
        let c = dist[g.identity()].clone();
        exact.push(BigRational::new(c.clone().into(), denom.clone().into()));
        counts.push(c);
    }
    let values = exact.iter().map(|q| q.to_f64().unwrap_or(0.0)).collect();
    Ok(MomentSequence {
        n,
        values,
        exact: Some(exact.iter().map(ToString::to_string).collect()),
        counts: Some(counts.iter().map(ToString::to_string).collect()),
    })
}

fn check_order(m: &MomentSequence, r: usize) -> Result<()> {
    if r == 0 || r > m.max_order() {
        return Err(QfError::Invalid(format!(
            "R = {r} needs moments up to order R (have {})",
            m.max_order()
        )));
    }
    Ok(())
}

/// Mass of the spectral measure at 1, as the mean of `m_p` over the window
/// `⌊R/2⌋ < p ≤ R`. Every point of `(-1, 1)` contributes `O(ρ^{R/2})`; the
/// point `-1` contributes `O(1/R)`.
pub fn atom_at_one(m: &MomentSequence, r: usize) -> Result<f64> {
    check_order(m, r)?;
    let window = &m.values[r / 2 + 1..=r];
    Ok(window.iter().sum::<f64>() / window.len() as f64)
}

/// Plain Cesàro mean `(1/R) Σ_{p=1}^R m_p`; its bias is `O(1/R)`.
pub fn cesaro_atom(m: &MomentSequence, r: usize) -> Result<f64> {
    check_order(m, r)?;
    Ok(m.values[1..=r].iter().sum::<f64>() / r as f64)
}

/// Whether `1` lies in the support, read from the ratio estimate
/// `(|m_p| / |m_{⌊p/2⌋}|)^{1/(p-⌊p/2⌋)}` over the upper half of the available
/// orders. Zero moments are skipped.
pub fn kesten_support(m: &MomentSequence) -> bool {
    let top = m.max_order();
    (top / 2 + 1..=top)
        .filter(|&p| p >= 2)
        .filter_map(|p| {
            let (hi, lo) = (m.values[p].abs(), m.values[p / 2].abs());
            (hi > 0.0 && lo > 0.0).then(|| (hi / lo).powf(1.0 / (p - p / 2) as f64))
        })
        .any(|rate| rate >= KESTEN_THRESHOLD)
}

/// Word systems with a built-in symmetric generating set.
#[derive(Clone, Debug)]
pub enum GrowthSystem<'a> {
    Finite(&'a FiniteGroup),
    /// `Z` with `S = {0, ±1}`.
    Integers,
    /// `D_∞ = <x, y | x² = y² = 1>` with `S = {e, x, y}`.
    InfiniteDihedral,
}

/// Element `t^k f` of `D_∞`, `t = xy`, with `x = (0, true)`, `y = (1, true)`.
type DihedralElem = (i64, bool);

fn dinf_mul(a: &DihedralElem, b: &DihedralElem) -> DihedralElem {
    let k = if a.1 { a.0 - b.0 } else { a.0 + b.0 };
    (k, a.1 ^ b.1)
}

fn dinf_inv(a: &DihedralElem) -> DihedralElem {
    if a.1 {
        *a
    } else {
        (-a.0, false)
    }
}

/// Ball volumes `v_0, …, v_{n_max}` for the word system.
pub fn growth_series(system: &GrowthSystem, n_max: usize, guard: usize) -> Result<Vec<usize>> {
    match system {
        GrowthSystem::Finite(g) => {
            let mut s: Vec<usize> = vec![g.identity()];
            for &x in g.generators() {
                s.push(x);
                s.push(g.inv(x));
            }
            growth_series_by(g.identity(), &s, |a, b| g.mul(*a, *b), |a| g.inv(*a), n_max, guard)
        }
        GrowthSystem::Integers => {
            growth_series_by(0i64, &[0, 1, -1], |a, b| a + b, |a| -a, n_max, guard)
        }
        GrowthSystem::InfiniteDihedral => growth_series_by(
            (0, false),
            &[(0, false), (0, true), (1, true)],
            dinf_mul,
            dinf_inv,
            n_max,
            guard,
        ),
    }
}

/// Breadth-first ball volumes for a generating set `s` containing the
/// identity and closed under `inv`. Fails once a ball exceeds `guard`.
pub fn growth_series_by<T, M, I>(
    identity: T,
    s: &[T],
    mul: M,
    inv: I,
    n_max: usize,
    guard: usize,
) -> Result<Vec<usize>>
where
    T: Clone + Ord,
    M: Fn(&T, &T) -> T,
    I: Fn(&T) -> T,
{
    let set: BTreeSet<T> = s.iter().cloned().collect();
    if !set.contains(&identity) {
        return Err(QfError::Invalid("generating set must contain the identity".into()));
    }
    if s.iter().any(|x| !set.contains(&inv(x))) {
        return Err(QfError::Invalid("generating set must be symmetric".into()));
    }
    let mut ball: BTreeSet<T> = BTreeSet::from([identity]);
    let mut frontier: Vec<T> = ball.iter().cloned().collect();
    let mut volumes = vec![1];
    for _ in 0..n_max {
        let mut next = Vec::new();
        for a in &frontier {
            for x in &set {
                let b = mul(a, x);
                if !ball.contains(&b) {
                    ball.insert(b.clone());
                    next.push(b);
                }
            }
        }
        if ball.len() > guard {
            return Err(QfError::TooLarge(format!("ball exceeds {guard} elements")));
        }
        volumes.push(ball.len());
        frontier = next;
    }
    Ok(volumes)
}
