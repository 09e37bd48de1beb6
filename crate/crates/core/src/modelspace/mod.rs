//! The universal quasi-flat model space `X_G` of a group dual: one component
//! per equivalence class of `K`-dimensional representations whose generators
//! have simple spectrum `{1, w, …, w^{K-1}}`.

mod latin;
mod magic;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::cyclotomic::Cyclo;
use crate::error::{QfError, Result};
use crate::groups::{irreps, ClassFunction, FiniteGroup, Irrep, MonomialRep};
use crate::linalg::{self, CMat};

pub use latin::{parse_perm_group, sparse_latin_squares, Permutation};
pub use magic::{fourier_magic, MagicUnitaryModel};

pub const EIGEN_TOL: f64 = 1e-8;
const UNITARY_TOL: f64 = 1e-10;

/// Generator images of a quasi-flat representation.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiFlatRep {
    k: usize,
    generators: Vec<CMat>,
}

impl QuasiFlatRep {
    /// Validates unitarity and quasi-flatness.
    pub fn new(k: usize, generators: Vec<CMat>) -> Result<Self> {
        let diag = is_quasiflat(&generators, k)?;
        if !diag.quasiflat {
            return Err(QfError::NotQuasiFlat(diag.message()));
        }
        Ok(QuasiFlatRep { k, generators })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    pub fn conjugate_by(&self, u: &CMat) -> QuasiFlatRep {
        QuasiFlatRep {
            k: self.k,
            generators: self.generators.iter().map(|m| u * m * u.adjoint()).collect(),
        }
    }

    /// `ρ(g)` for every element, extended along the Cayley graph; errors when
    /// the generator images violate a relation of `g`.
    pub fn extend_to_group(&self, g: &FiniteGroup) -> Result<Vec<CMat>> {
        extend_to_group(g, &self.generators)
    }
}

pub fn extend_to_group(g: &FiniteGroup, gens: &[CMat]) -> Result<Vec<CMat>> {
    if gens.len() != g.generators().len() {
        return Err(QfError::Invalid("one matrix per generator is required".into()));
    }
    let k = gens[0].nrows();
    let mut img: Vec<Option<CMat>> = vec![None; g.order()];
    img[g.identity()] = Some(linalg::identity(k));
    let mut stack = vec![g.identity()];
    while let Some(x) = stack.pop() {
        let mx = img[x].clone().unwrap();
        for (i, &gen) in g.generators().iter().enumerate() {
            let y = g.mul(x, gen);
            let my = &mx * &gens[i];
            match &img[y] {
                Some(prev) => {
                    if linalg::max_abs_diff(prev, &my) > 1e-9 {
                        return Err(QfError::Invalid(format!(
                            "generator images violate a relation at {}",
                            g.label(y)
                        )));
                    }
                }
                None => {
                    img[y] = Some(my);
                    stack.push(y);
                }
            }
        }
    }
    Ok(img.into_iter().map(Option::unwrap).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiFlatDiagnostic {
    pub quasiflat: bool,
    /// First failing generator with its spectrum.
    pub offending: Option<(usize, Vec<Complex64>)>,
}

impl QuasiFlatDiagnostic {
    pub fn message(&self) -> String {
        match &self.offending {
            None => "quasi-flat".into(),
            Some((i, ev)) => {
                let list: Vec<String> = ev
                    .iter()
                    .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
                    .collect();
                format!("generator {i} has spectrum [{}]", list.join(", "))
            }
        }
    }
}

/// Nearest `K`-th root exponent of each eigenvalue, or `None` when some
/// eigenvalue is farther than [`EIGEN_TOL`] from every root or two eigenvalues
/// share a nearest root.
pub fn root_assignment(m: &CMat, k: usize) -> Option<Vec<usize>> {
    let ev = linalg::eigenvalues(m);
    if ev.len() != k {
        return None;
    }
    let mut used = vec![false; k];
    let mut out = Vec::with_capacity(k);
    for z in ev {
        let t = z.arg() * k as f64 / (2.0 * std::f64::consts::PI);
        let j = (t.round() as i64).rem_euclid(k as i64) as usize;
        if (z - linalg::root_of_unity(k, j as i64)).norm() > EIGEN_TOL || used[j] {
            return None;
        }
        used[j] = true;
        out.push(j);
    }
    Some(out)
}

/// Checks that every generator has the `K` distinct `K`-th roots of unity as
/// its eigenvalues.
pub fn is_quasiflat(mats: &[CMat], k: usize) -> Result<QuasiFlatDiagnostic> {
    for m in mats {
        let residual = linalg::unitarity_residual(m);
        if residual > UNITARY_TOL {
            return Err(QfError::NotUnitary { residual });
        }
    }
    for (i, m) in mats.iter().enumerate() {
        if m.nrows() != k || root_assignment(m, k).is_none() {
            return Ok(QuasiFlatDiagnostic {
                quasiflat: false,
                offending: Some((i, linalg::eigenvalues(m))),
            });
        }
    }
    Ok(QuasiFlatDiagnostic {
        quasiflat: true,
        offending: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    /// Sum of `K` distinct characters; `tau[i-1][a]` is the exponent of `g_i`
    /// on the constituent where `g_1` acts by `w^a`.
    Loose { tau: Vec<Vec<usize>> },
    Solid,
    Mixed,
}

impl ComponentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ComponentKind::Loose { .. } => "loose",
            ComponentKind::Solid => "solid",
            ComponentKind::Mixed => "mixed",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ModelComponent {
    kind: ComponentKind,
    label: String,
    constituents: Vec<usize>,
    constituent_labels: Vec<String>,
    rep: MonomialRep,
    representative: QuasiFlatRep,
    trace: ClassFunction,
    commutant_dim: usize,
}

impl ModelComponent {
    pub fn kind(&self) -> &ComponentKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Indices into [`irreps`], ascending with repetition.
    pub fn constituents(&self) -> &[usize] {
        &self.constituents
    }

    pub fn constituent_labels(&self) -> &[String] {
        &self.constituent_labels
    }

    pub fn representative(&self) -> &QuasiFlatRep {
        &self.representative
    }

    /// The representative as a monomial representation of the whole group.
    pub fn monomial(&self) -> &MonomialRep {
        &self.rep
    }

    pub fn trace(&self) -> &ClassFunction {
        &self.trace
    }

    pub fn commutant_dim(&self) -> usize {
        self.commutant_dim
    }

    pub fn k(&self) -> usize {
        self.representative.k
    }

    pub fn summary(&self) -> ComponentSummary {
        ComponentSummary {
            kind: self.kind.name().to_string(),
            label: self.label.clone(),
            constituents: self.constituent_labels.clone(),
            commutant_dim: self.commutant_dim,
            trace: self.trace.values().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentSummary {
    pub kind: String,
    pub label: String,
    pub constituents: Vec<String>,
    pub commutant_dim: usize,
    pub trace: Vec<[f64; 2]>,
}

/// `φ_c(g) = tr ρ(g) / K`.
pub fn component_trace(c: &ModelComponent) -> ClassFunction {
    c.trace.clone()
}

const MAX_MULTISETS: usize = 1_000_000;

/// Enumerates the components of `X_G`: multisets of irreducibles of total
/// dimension `K` whose generator spectra are simple, loose components first.
pub fn enumerate_components(g: &FiniteGroup, k: usize) -> Result<Vec<ModelComponent>> {
    if k != g.gen_order() {
        return Err(QfError::GenOrderMismatch {
            expected: g.gen_order(),
            got: k,
        });
    }
    let irr = irreps(g)?;
    let small: Vec<usize> = (0..irr.len()).filter(|&i| irr[i].dim() <= k).collect();
    let mut multisets = Vec::new();
    let mut current = Vec::new();
    collect_multisets(&irr, &small, 0, k, &mut current, &mut multisets)?;

    let gen_powers: Vec<Vec<usize>> = g
        .generators()
        .iter()
        .map(|&x| (1..k as i64).map(|p| g.pow(x, p)).collect())
        .collect();
    let mut out = Vec::new();
    for ms in multisets {
        if !spectrum_is_flat(&irr, &ms, &gen_powers) {
            continue;
        }
        out.push(build_component(g, &irr, ms, k)?);
    }
    out.sort_by_key(|a| kind_rank(&a.kind));
    Ok(out)
}

fn kind_rank(kind: &ComponentKind) -> (u8, Vec<Vec<usize>>) {
    match kind {
        ComponentKind::Loose { tau } => (0, tau.clone()),
        ComponentKind::Solid => (1, Vec::new()),
        ComponentKind::Mixed => (2, Vec::new()),
    }
}

fn collect_multisets(
    irr: &[Irrep],
    small: &[usize],
    start: usize,
    remaining: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    if remaining == 0 {
        if out.len() >= MAX_MULTISETS {
            return Err(QfError::TooLarge("irrep multisets".into()));
        }
        out.push(current.clone());
        return Ok(());
    }
    for s in start..small.len() {
        let d = irr[small[s]].dim();
        if d <= remaining {
            current.push(small[s]);
            collect_multisets(irr, small, s, remaining - d, current, out)?;
            current.pop();
        }
    }
    Ok(())
}

/// Simple spectrum on `g_i` is equivalent to `Σ χ(g_i^p) = 0` for `0 < p < K`
/// since `g_i^K = e`; checked exactly.
fn spectrum_is_flat(irr: &[Irrep], ms: &[usize], gen_powers: &[Vec<usize>]) -> bool {
    gen_powers.iter().all(|powers| {
        powers.iter().all(|&h| {
            ms.iter()
                .fold(None::<Cyclo>, |acc, &i| {
                    let v = irr[i].rep().character_exact(h);
                    Some(match acc {
                        None => v,
                        Some(a) => a.add(&v),
                    })
                })
                .is_some_and(|s| s.is_zero())
        })
    })
}

fn build_component(g: &FiniteGroup, irr: &[Irrep], ms: Vec<usize>, k: usize) -> Result<ModelComponent> {
    let e = g.exponent() as u32;
    let step = e / k as u32;
    let all_linear = ms.iter().all(|&i| irr[i].dim() == 1);
    let (kind, label, ordered) = if all_linear {
        let mut ordered = ms.clone();
        let g1 = g.generators()[0];
        ordered.sort_by_key(|&i| irr[i].rep().linear_exp(g1).unwrap() / step);
        let tau: Vec<Vec<usize>> = g.generators()[1..]
            .iter()
            .map(|&gi| {
                ordered
                    .iter()
                    .map(|&i| (irr[i].rep().linear_exp(gi).unwrap() / step) as usize)
                    .collect()
            })
            .collect();
        let label = loose_label(&tau, k);
        (ComponentKind::Loose { tau }, label, ordered)
    } else if ms.len() == 1 {
        let label = format!("solid {}", irr[ms[0]].label());
        (ComponentKind::Solid, label, ms.clone())
    } else {
        let names: Vec<&str> = ms.iter().map(|&i| irr[i].label()).collect();
        (ComponentKind::Mixed, format!("mixed {}", names.join("+")), ms.clone())
    };
    let parts: Vec<&MonomialRep> = ordered.iter().map(|&i| irr[i].rep()).collect();
    let rep = MonomialRep::direct_sum(&parts);
    let representative = QuasiFlatRep::new(
        k,
        g.generators().iter().map(|&x| rep.matrix(x)).collect(),
    )?;
    let inv_k = BigRational::new(One::one(), (k as i64).into());
    let trace = rep.class_function(g).scale(&inv_k);
    let commutant_dim = linalg::commutant_dim(representative.generators(), 1e-9);
    Ok(ModelComponent {
        kind,
        label,
        constituent_labels: ms.iter().map(|&i| irr[i].label().to_string()).collect(),
        constituents: ms,
        rep,
        representative,
        trace,
        commutant_dim,
    })
}

fn loose_label(tau: &[Vec<usize>], k: usize) -> String {
    if k == 2 && tau.len() == 1 {
        return if tau[0] == [0, 1] { "X+".into() } else { "X-".into() };
    }
    let rows: Vec<String> = tau
        .iter()
        .map(|t| t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    format!("X_tau[{}]", rows.join(";"))
}

/// `U ρ U*` for a Haar-random `U`.
pub fn sample_point(c: &ModelComponent, seed: u64) -> QuasiFlatRep {
    let u = linalg::haar_unitary(c.k(), seed);
    c.representative.conjugate_by(&u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{build_dihedral, build_heisenberg, build_meta144};
    use crate::linalg::{root_of_unity, ONE};

    fn diag(v: &[Complex64]) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_vec(v.to_vec()))
    }

    #[test]
    fn quasiflat_small_cases() {
        let d = diag(&[ONE, -ONE]);
        assert!(is_quasiflat(&[d], 2).unwrap().quasiflat);
        let id = linalg::identity(2);
        let diagn = is_quasiflat(&[id], 2).unwrap();
        assert!(!diagn.quasiflat);
        assert_eq!(diagn.offending.as_ref().unwrap().0, 0);
        let bad = CMat::from_element(2, 2, ONE);
        assert!(matches!(is_quasiflat(&[bad], 2), Err(QfError::NotUnitary { .. })));
    }

    #[test]
    fn dihedral_two_dim_is_quasiflat() {
        let g = build_dihedral(4).unwrap();
        let irr = irreps(&g).unwrap();
        let two = irr.iter().find(|r| r.dim() == 2).unwrap();
        assert!(is_quasiflat(&two.generator_matrices(&g), 2).unwrap().quasiflat);
    }

    #[test]
    fn component_censuses() {
        for n in [4usize, 6, 8] {
            let g = build_dihedral(n).unwrap();
            let comps = enumerate_components(&g, 2).unwrap();
            assert_eq!(comps.len(), n / 2 - 1 + 2);
            let labels: Vec<&str> = comps.iter().map(|c| c.label()).collect();
            assert!(labels.contains(&"X+") && labels.contains(&"X-"));
        }
        let h = build_heisenberg(3).unwrap();
        let comps = enumerate_components(&h, 3).unwrap();
        assert_eq!(comps.len(), 8);
        let loose = comps.iter().filter(|c| c.kind().name() == "loose").count();
        assert_eq!(loose, 6);
        let m = build_meta144();
        let comps = enumerate_components(&m, 3).unwrap();
        let loose = comps.iter().filter(|c| c.kind().name() == "loose").count();
        let solid = comps.iter().filter(|c| c.kind().name() == "solid").count();
        assert_eq!((loose, solid, comps.len()), (6, 6, 12));
        assert!(matches!(
            enumerate_components(&m, 2),
            Err(QfError::GenOrderMismatch { .. })
        ));
    }

    #[test]
    fn commutant_dims_are_multiplicity_sums() {
        for g in [build_dihedral(6).unwrap(), build_heisenberg(3).unwrap(), build_meta144()] {
            for c in enumerate_components(&g, g.gen_order()).unwrap() {
                let mut counts = std::collections::BTreeMap::new();
                for &i in c.constituents() {
                    *counts.entry(i).or_insert(0usize) += 1;
                }
                let expect: usize = counts.values().map(|m| m * m).sum();
                assert_eq!(c.commutant_dim(), expect, "{}", c.label());
                match c.kind() {
                    ComponentKind::Loose { .. } => assert_eq!(c.commutant_dim(), g.gen_order()),
                    ComponentKind::Solid => assert_eq!(c.commutant_dim(), 1),
                    ComponentKind::Mixed => {}
                }
            }
        }
    }

    #[test]
    fn traces_at_special_elements() {
        let g = build_dihedral(4).unwrap();
        let comps = enumerate_components(&g, 2).unwrap();
        let xm = comps.iter().find(|c| c.label() == "X-").unwrap();
        let x = g.generators()[0];
        assert!(xm.trace().at(g.class_of(x)).norm() < 1e-15);
        for c in &comps {
            assert!((c.trace().at(g.identity_class()) - ONE).norm() < 1e-15);
        }

        let h = build_heisenberg(3).unwrap();
        let z = h.commutator(h.generators()[0], h.generators()[1]);
        let mut found = Vec::new();
        for c in enumerate_components(&h, 3).unwrap() {
            if *c.kind() == ComponentKind::Solid {
                let v = c.trace().at(h.class_of(z));
                let l = (1..3).find(|&l| (v - root_of_unity(3, l)).norm() < 1e-12);
                found.push(l.expect("central value is a primitive cube root"));
            }
        }
        found.sort_unstable();
        assert_eq!(found, vec![1, 2]);
    }

    #[test]
    fn samples_keep_character_and_flatness() {
        let h = build_heisenberg(3).unwrap();
        let comps = enumerate_components(&h, 3).unwrap();
        for c in &comps {
            for seed in [1u64, 2] {
                let s = sample_point(c, seed);
                assert!(is_quasiflat(s.generators(), 3).unwrap().quasiflat);
                let all = s.extend_to_group(&h).unwrap();
                for (cl, members) in h.classes().iter().enumerate() {
                    let tr = linalg::trace(&all[members[0]]) / 3.0;
                    assert!((tr - c.trace().at(cl)).norm() < 1e-10);
                }
                if *c.kind() == ComponentKind::Solid {
                    assert_eq!(linalg::commutant_dim(s.generators(), 1e-9), 1);
                }
            }
        }
    }
}
