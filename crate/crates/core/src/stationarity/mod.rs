//! Stationary component weights for group duals, convolution powers and
//! Cesàro limits, and inner-faithfulness certificates.
//!
//! For a group dual the Haar functional is `g ↦ δ_{g,e}`, so a measure
//! `Σ_c w_c μ_{X_c}` is stationary exactly when `Σ_c w_c φ_c = δ_e` on every
//! conjugacy class.
//!
//! The solver works over `Q`. The Galois group of `Q(ζ_{exp G})` permutes the
//! components (`φ_{σc}(g) = φ_c(g^k)`) and preserves the feasible set, so a
//! feasible point exists iff a Galois-invariant one does. On invariant weights
//! the class equations have rational coefficients (orbit sums of traces). The
//! minimum-norm feasible point is unique, hence invariant, and is computed
//! exactly as well.

pub mod exact;
mod faithful;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::cyclotomic::Cyclo;
use crate::error::{QfError, Result};
use crate::groups::{ClassFunction, Family, FiniteGroup};
use crate::linalg::{self, CMat};
use crate::modelspace::{ComponentKind, ModelComponent};
use exact::{q, simplex, solve_any, verify_farkas, LpOutcome, Q};

pub use faithful::{
    generic_subgroups, inner_faithfulness_certificate, kernel_intersection, FaithfulnessCertificate,
    FixedCharacter, GenericSubgroup, InducedWitness, KernelCertificate,
};

const MAX_ORBITS: usize = 16;

mod qser {
    use super::Q;
    use serde::Serializer;

    pub fn vec<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(ToString::to_string))
    }

    pub fn mat<S: Serializer>(m: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            m.iter()
                .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()),
        )
    }

    pub fn opt_vec<S: Serializer>(v: &Option<Vec<Q>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => vec(v, s),
            None => s.serialize_none(),
        }
    }
}

fn complex_pairs<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|z| [z.re, z.im]))
}

/// Exact traces of every component, one `Vec` per component.
fn exact_traces(comps: &[ModelComponent]) -> Result<Vec<Vec<Cyclo>>> {
    comps
        .iter()
        .map(|c| {
            c.trace()
                .exact()
                .map(<[Cyclo]>::to_vec)
                .ok_or_else(|| QfError::Invalid("component trace lacks exact values".into()))
        })
        .collect()
}

/// Orbits of the Galois action on the component list, each sorted, ordered by
/// least member.
pub fn galois_orbits(g: &FiniteGroup, comps: &[ModelComponent]) -> Result<Vec<Vec<usize>>> {
    let traces = exact_traces(comps)?;
    let e = g.exponent() as i64;
    let mut orbit_of = vec![usize::MAX; comps.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for c in 0..comps.len() {
        if orbit_of[c] != usize::MAX {
            continue;
        }
        let mut members = Vec::new();
        for k in (1..=e.max(1)).filter(|k| k.gcd(&e) == 1) {
            let image: Vec<Cyclo> = traces[c].iter().map(|v| v.galois(k)).collect();
            let d = traces
                .iter()
                .position(|t| *t == image)
                .ok_or(QfError::NotGaloisClosed)?;
            if !members.contains(&d) {
                members.push(d);
            }
        }
        members.sort_unstable();
        for &m in &members {
            orbit_of[m] = orbits.len();
        }
        orbits.push(members);
    }
    Ok(orbits)
}

/// The orbit-aggregated system `Σ_O |O| u_O = 1`, `Σ_O u_O S_O(C) = 0` for
/// `C ≠ e`; returns `(A, b, row names)`.
fn orbit_system(
    g: &FiniteGroup,
    comps: &[ModelComponent],
    orbits: &[Vec<usize>],
) -> Result<(Vec<Vec<Q>>, Vec<Q>, Vec<String>)> {
    let traces = exact_traces(comps)?;
    let mut a = vec![orbits.iter().map(|o| q(o.len() as i64, 1)).collect::<Vec<_>>()];
    let mut b = vec![Q::one()];
    let mut names = vec!["normalization".to_string()];
    for cls in 0..g.num_classes() {
        if cls == g.identity_class() {
            continue;
        }
        let row = orbits
            .iter()
            .map(|o| {
                let s = o
                    .iter()
                    .fold(Cyclo::zero(g.exponent() as u32), |acc, &c| acc.add(&traces[c][cls]));
                s.as_rational().ok_or(QfError::NotGaloisClosed)
            })
            .collect::<Result<Vec<_>>>()?;
        a.push(row);
        b.push(Q::zero());
        names.push(format!("class {}", g.label(g.class_rep(cls))));
    }
    Ok((a, b, names))
}

/// Orbit-level Farkas certificate for the stationarity system.
#[derive(Clone, Debug, Serialize)]
pub struct InfeasibilityCertificate {
    /// Component labels aggregated into each variable.
    pub variables: Vec<Vec<String>>,
    pub equations: Vec<String>,
    #[serde(serialize_with = "qser::mat")]
    pub matrix: Vec<Vec<Q>>,
    #[serde(serialize_with = "qser::vec")]
    pub rhs: Vec<Q>,
    /// `y` with `yᵀA ≤ 0` and `yᵀb > 0`.
    #[serde(serialize_with = "qser::vec")]
    pub multipliers: Vec<Q>,
}

impl InfeasibilityCertificate {
    /// Rows with a nonzero multiplier.
    pub fn cited_rows(&self) -> Vec<usize> {
        (0..self.multipliers.len())
            .filter(|&i| !self.multipliers[i].is_zero())
            .collect()
    }

    /// Re-checks the Farkas inequalities on the cited subsystem and, as an
    /// independent route, that phase one of the simplex method finds the
    /// subsystem infeasible.
    pub fn verify(&self) -> bool {
        let rows = self.cited_rows();
        let a: Vec<Vec<Q>> = rows.iter().map(|&i| self.matrix[i].clone()).collect();
        let b: Vec<Q> = rows.iter().map(|&i| self.rhs[i].clone()).collect();
        let y: Vec<Q> = rows.iter().map(|&i| self.multipliers[i].clone()).collect();
        let n = a.first().map_or(0, Vec::len);
        verify_farkas(&a, &b, &y)
            && matches!(
                simplex(&a, &b, &vec![Q::zero(); n]),
                LpOutcome::Infeasible { .. }
            )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StationarityReport {
    pub feasible: bool,
    pub labels: Vec<String>,
    pub weights: Option<Vec<f64>>,
    #[serde(serialize_with = "qser::opt_vec")]
    pub weights_exact: Option<Vec<Q>>,
    /// `Σ_c w_c φ_c − δ_e` per class, when feasible.
    #[serde(serialize_with = "complex_pairs")]
    pub residuals: Vec<Complex64>,
    pub max_residual: Option<f64>,
    /// Dimension of the feasible polytope.
    pub polytope_dim: Option<usize>,
    pub certificate: Option<InfeasibilityCertificate>,
}

/// `r(C) = Σ_c w_c φ_c(C) − δ_{C,e}`, one value per class.
pub fn residual(g: &FiniteGroup, comps: &[ModelComponent], weights: &[f64]) -> Result<Vec<Complex64>> {
    if comps.len() != weights.len() {
        return Err(QfError::WeightMismatch(format!(
            "{} weights for {} components",
            weights.len(),
            comps.len()
        )));
    }
    Ok((0..g.num_classes())
        .map(|cls| {
            let s: Complex64 = comps
                .iter()
                .zip(weights)
                .map(|(c, &w)| c.trace().at(cls) * w)
                .sum();
            let delta = if cls == g.identity_class() { 1.0 } else { 0.0 };
            s - delta
        })
        .collect())
}

/// Exact residual per class.
pub fn residual_exact(g: &FiniteGroup, comps: &[ModelComponent], weights: &[Q]) -> Result<Vec<Cyclo>> {
    if comps.len() != weights.len() {
        return Err(QfError::WeightMismatch(format!(
            "{} weights for {} components",
            weights.len(),
            comps.len()
        )));
    }
    let traces = exact_traces(comps)?;
    let e = g.exponent() as u32;
    Ok((0..g.num_classes())
        .map(|cls| {
            let s = traces
                .iter()
                .zip(weights)
                .fold(Cyclo::zero(e), |acc, (t, w)| acc.add(&t[cls].scale(w)));
            if cls == g.identity_class() {
                s.sub(&Cyclo::from_int(e, 1))
            } else {
                s
            }
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightCheck {
    pub exact_zero: bool,
    #[serde(serialize_with = "complex_pairs")]
    pub residuals: Vec<Complex64>,
    pub max_residual: f64,
}

/// Verifies prescribed weights exactly; errors when they are negative or do
/// not sum to 1.
pub fn verify_weights(g: &FiniteGroup, comps: &[ModelComponent], weights: &[Q]) -> Result<WeightCheck> {
    if weights.iter().any(Signed::is_negative) {
        return Err(QfError::WeightMismatch("negative weight".into()));
    }
    let total = weights.iter().fold(Q::zero(), |a, w| a + w);
    if total != Q::one() {
        return Err(QfError::WeightMismatch(format!("weights sum to {total}")));
    }
    let exact = residual_exact(g, comps, weights)?;
    let residuals: Vec<Complex64> = exact.iter().map(Cyclo::to_complex).collect();
    Ok(WeightCheck {
        exact_zero: exact.iter().all(Cyclo::is_zero),
        max_residual: residuals.iter().fold(0.0f64, |m, z| m.max(z.norm())),
        residuals,
    })
}

/// The measures described for the dihedral and Heisenberg families: uniform
/// over loose components with total mass `1/K`, `1/K` on each solid component.
pub fn reference_weights(g: &FiniteGroup, comps: &[ModelComponent]) -> Option<Vec<Q>> {
    match g.family() {
        Family::Dihedral { n } => Some(
            comps
                .iter()
                .map(|c| match c.kind() {
                    ComponentKind::Loose { .. } => q(1, *n as i64),
                    _ => q(2, *n as i64),
                })
                .collect(),
        ),
        Family::Heisenberg { k } => {
            let k = *k as i64;
            let fact: i64 = (1..=k).product();
            Some(
                comps
                    .iter()
                    .map(|c| match c.kind() {
                        ComponentKind::Loose { .. } => q(1, k * fact),
                        _ => q(1, k),
                    })
                    .collect(),
            )
        }
        _ => None,
    }
}

/// Decides feasibility of stationary weights; returns the minimum-norm weights
/// or a Farkas certificate.
pub fn solve_weights(g: &FiniteGroup, comps: &[ModelComponent]) -> Result<StationarityReport> {
    if comps.is_empty() {
        return Err(QfError::Invalid("no components".into()));
    }
    let labels: Vec<String> = comps.iter().map(|c| c.label().to_string()).collect();
    let orbits = galois_orbits(g, comps)?;
    let (a, b, names) = orbit_system(g, comps, &orbits)?;
    let n = orbits.len();
    match simplex(&a, &b, &vec![Q::zero(); n]) {
        LpOutcome::Infeasible { farkas } => {
            let variables = orbits
                .iter()
                .map(|o| o.iter().map(|&c| labels[c].clone()).collect())
                .collect();
            Ok(StationarityReport {
                feasible: false,
                labels,
                weights: None,
                weights_exact: None,
                residuals: Vec::new(),
                max_residual: None,
                polytope_dim: None,
                certificate: Some(InfeasibilityCertificate {
                    variables,
                    equations: names,
                    matrix: a,
                    rhs: b,
                    multipliers: farkas,
                }),
            })
        }
        LpOutcome::Unbounded => unreachable!("zero objective is bounded"),
        LpOutcome::Optimal { .. } => {
            let u = min_norm_orbit_point(&a, &b, &orbits)?;
            let mut w = vec![Q::zero(); comps.len()];
            for (o, uo) in orbits.iter().zip(&u) {
                for &c in o {
                    w[c] = uo.clone();
                }
            }
            let wf: Vec<f64> = w.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
            let residuals = residual(g, comps, &wf)?;
            let max_residual = residuals.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            let polytope_dim = Some(polytope_dimension(g, comps, &a, &b, &orbits));
            Ok(StationarityReport {
                feasible: true,
                labels,
                weights: Some(wf),
                weights_exact: Some(w),
                residuals,
                max_residual: Some(max_residual),
                polytope_dim,
                certificate: None,
            })
        }
    }
}

/// Minimises `Σ_O |O| u_O²` over the feasible set by trying every support:
/// the optimum is the affine minimiser on the face containing it.
fn min_norm_orbit_point(a: &[Vec<Q>], b: &[Q], orbits: &[Vec<usize>]) -> Result<Vec<Q>> {
    let n = orbits.len();
    if n > MAX_ORBITS {
        return Err(QfError::TooLarge(format!("{n} Galois orbits")));
    }
    let size: Vec<Q> = orbits.iter().map(|o| q(o.len() as i64, 1)).collect();
    let mut best: Option<(Q, Vec<Q>)> = None;
    for mask in 1u32..(1 << n) {
        let free: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        // u_F = D⁻¹ A_Fᵀ λ with (A_F D⁻¹ A_Fᵀ) λ = b
        let m: Vec<Vec<Q>> = a
            .iter()
            .map(|ri| {
                a.iter()
                    .map(|rj| {
                        free.iter()
                            .fold(Q::zero(), |acc, &f| acc + &ri[f] * &rj[f] / &size[f])
                    })
                    .collect()
            })
            .collect();
        let Some(lambda) = solve_any(&m, b) else {
            continue;
        };
        let mut u = vec![Q::zero(); n];
        for &f in &free {
            u[f] = a
                .iter()
                .zip(&lambda)
                .fold(Q::zero(), |acc, (row, l)| acc + &row[f] * l)
                / &size[f];
        }
        if u.iter().any(Signed::is_negative) {
            continue;
        }
        debug_assert!(a.iter().zip(b).all(|(row, bi)| exact::dot(row, &u) == *bi));
        let norm = u
            .iter()
            .zip(&size)
            .fold(Q::zero(), |acc, (x, s)| acc + x * x * s);
        if best.as_ref().is_none_or(|(bn, _)| norm < *bn) {
            best = Some((norm, u));
        }
    }
    best.map(|(_, u)| u)
        .ok_or_else(|| QfError::Invalid("feasible system without a minimum-norm point".into()))
}

/// `#(components not forced to zero) − rank` of the real equality system
/// restricted to them.
fn polytope_dimension(
    g: &FiniteGroup,
    comps: &[ModelComponent],
    a: &[Vec<Q>],
    b: &[Q],
    orbits: &[Vec<usize>],
) -> usize {
    let n = orbits.len();
    let mut live = Vec::new();
    for (i, o) in orbits.iter().enumerate() {
        let mut c = vec![Q::zero(); n];
        c[i] = Q::one();
        if let LpOutcome::Optimal { value, .. } = simplex(a, b, &c) {
            if value.is_positive() {
                live.extend(o.iter().copied());
            }
        }
    }
    live.sort_unstable();
    let cols = live.len();
    let nonid: Vec<usize> = (0..g.num_classes()).filter(|&c| c != g.identity_class()).collect();
    let rows = 1 + 2 * nonid.len();
    let mut m = CMat::zeros(rows, cols);
    for (j, &c) in live.iter().enumerate() {
        m[(0, j)] = linalg::ONE;
        for (r, &cls) in nonid.iter().enumerate() {
            let v = comps[c].trace().at(cls);
            m[(1 + 2 * r, j)] = Complex64::new(v.re, 0.0);
            m[(2 + 2 * r, j)] = Complex64::new(v.im, 0.0);
        }
    }
    cols - linalg::rank(&m, 1e-9)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitSumTable {
    pub probes: Vec<String>,
    pub orbits: Vec<String>,
    /// `values[probe][orbit] = Σ_{χ ∈ O} χ(a)`.
    pub values: Vec<Vec<i64>>,
}

/// Orbit sums of the two size-3 dual orbits at the probes `p₁⊗q₁`,
/// `p₁⊗q₁ + p₂⊗q₂` and `p₁⊗q₂ + p₂⊗q₁`.
pub fn orbit_sum_table(g: &FiniteGroup) -> Result<OrbitSumTable> {
    let Family::Meta144(data) = g.family() else {
        return Err(QfError::Unsupported("orbit sums need the order-144 group".into()));
    };
    let (chars, orbits) = crate::groups::meta144_dual_orbits(g)?;
    let names = crate::groups::meta144_orbit_names(g)?;
    // bit 2k + l is the coefficient of p_{k+1} ⊗ q_{l+1}
    let probes = [("p1(x)q1", 0b0001usize), ("p1(x)q1+p2(x)q2", 0b1001), ("p1(x)q2+p2(x)q1", 0b0110)];
    let e = chars.root_order();
    let mut cols = Vec::new();
    for want in ["O1", "O2"] {
        let idx = names
            .iter()
            .position(|n| n == want)
            .ok_or_else(|| QfError::Invalid(format!("orbit {want} not found")))?;
        cols.push(idx);
    }
    let values = probes
        .iter()
        .map(|&(_, bits)| {
            let a = data.a_elems[bits];
            cols.iter()
                .map(|&o| {
                    let s = Cyclo::sum_of_roots(
                        e,
                        orbits[o].members.iter().map(|&chi| chars.value_exp(chi, a) as i64),
                    );
                    s.as_rational()
                        .and_then(|r| r.to_integer().to_i64())
                        .expect("orbit sums of ±1 values are integers")
                })
                .collect()
        })
        .collect();
    Ok(OrbitSumTable {
        probes: probes.iter().map(|p| p.0.to_string()).collect(),
        orbits: vec!["O1".into(), "O2".into()],
        values,
    })
}

/// `g ↦ φ(g)^r`: convolution is pointwise on group-like elements.
pub fn convolution_power(phi: &ClassFunction, r: u32) -> ClassFunction {
    match phi.exact() {
        Some(ex) => ClassFunction::from_exact(ex.iter().map(|v| v.pow(r)).collect()),
        None => ClassFunction::from_values(phi.values().iter().map(|v| v.powu(r)).collect()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CesaroValue {
    pub average: [f64; 2],
    /// The limit of the averages is 1 when `φ(g) = 1` and 0 otherwise.
    pub limit_is_one: bool,
}

/// `(1/R) Σ_{r=1}^R φ(g)^r`.
pub fn cesaro_haar(value: Complex64, r_max: usize) -> Result<CesaroValue> {
    if r_max == 0 {
        return Err(QfError::Invalid("R must be at least 1".into()));
    }
    if value.norm() > 1.0 + 1e-12 {
        return Err(QfError::Invalid("normalised traces have modulus at most 1".into()));
    }
    let mut p = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for _ in 0..r_max {
        p *= value;
        sum += p;
    }
    let avg = sum / r_max as f64;
    Ok(CesaroValue {
        average: [avg.re, avg.im],
        limit_is_one: (value - 1.0).norm() < 1e-12,
    })
}

/// `Σ_c w_c φ_c` as a class function.
pub fn weighted_trace(comps: &[ModelComponent], weights: &[Q]) -> ClassFunction {
    comps
        .iter()
        .zip(weights)
        .map(|(c, w)| c.trace().scale(w))
        .reduce(|a, b| a.add(&b))
        .expect("at least one component")
}
