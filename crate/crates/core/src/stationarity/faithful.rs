use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{QfError, Result};
use crate::groups::{abelian_characters, induce, is_prime, FiniteGroup};
use crate::modelspace::{is_quasiflat, ModelComponent};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelCertificate {
    pub intersection: Vec<usize>,
    pub labels: Vec<String>,
    pub faithful: bool,
}

/// Joint kernel of the component representatives.
pub fn kernel_intersection(g: &FiniteGroup, comps: &[ModelComponent]) -> KernelCertificate {
    let intersection: Vec<usize> = (0..g.order())
        .filter(|&h| {
            comps.iter().all(|c| {
                let rep = c.monomial();
                (0..rep.dim()).all(|t| rep.action(h, t) == (t, 0))
            })
        })
        .collect();
    KernelCertificate {
        labels: intersection.iter().map(|&h| g.label(h).to_string()).collect(),
        faithful: intersection == [g.identity()],
        intersection,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericSubgroup {
    /// The subgroup is `<x y^j>`.
    pub j: usize,
    pub elements: Vec<(usize, usize)>,
}

/// The order-`K` subgroups of `Z_K²` meeting neither `<x>` nor `<y>`.
pub fn generic_subgroups(k: usize) -> Result<Vec<GenericSubgroup>> {
    if !is_prime(k) {
        return Err(QfError::CompositeK(k));
    }
    Ok((1..k)
        .map(|j| {
            let mut elements: Vec<(usize, usize)> = (0..k).map(|t| (t, (t * j) % k)).collect();
            elements.sort_unstable();
            GenericSubgroup { j, elements }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedCharacter {
    /// Index into the lexicographically sorted characters of `A`.
    pub character: usize,
    pub exponents: Vec<u32>,
    /// Generic subgroups `<x y^j>` fixing it.
    pub fixed_by: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InducedWitness {
    pub character: usize,
    pub j: usize,
    pub dim: usize,
    /// Eigenvalues of each generator as `[re, im]`.
    pub spectra: Vec<Vec<[f64; 2]>>,
    pub quasiflat: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaithfulnessCertificate {
    pub faithful: bool,
    pub derived_order: usize,
    pub fixed: Vec<FixedCharacter>,
    /// Order of the subgroup of `Â` generated by the generically fixed characters.
    pub generated_order: usize,
    pub induced: Option<InducedWitness>,
}

/// Checks that the characters of `A = [G, G]` fixed by some generic subgroup
/// of `G/A ≅ Z_K²` generate `Â`, and induces one of them to a quasi-flat
/// representation.
pub fn inner_faithfulness_certificate(g: &FiniteGroup) -> Result<FaithfulnessCertificate> {
    let k = g.gen_order();
    if g.generators().len() != 2 {
        return Err(QfError::NotMetabelian("two generators are required".into()));
    }
    if !is_prime(k) {
        return Err(QfError::CompositeK(k));
    }
    let a = g.derived_subgroup();
    if !g.is_abelian_set(&a) {
        return Err(QfError::NotMetabelian("derived subgroup is not abelian".into()));
    }
    let quotient = g
        .abelian_quotient_map()
        .ok_or_else(|| QfError::NotMetabelian("generators do not map onto Z_K^2".into()))?;
    let kernel: Vec<usize> = (0..g.order()).filter(|&h| quotient[h] == [0, 0]).collect();
    if kernel != a {
        return Err(QfError::NotMetabelian("G/[G,G] is not Z_K^2".into()));
    }
    let chars = abelian_characters(g, &a)?;
    let lift = |v: (usize, usize)| -> usize {
        (0..g.order())
            .find(|&h| quotient[h] == [v.0, v.1])
            .expect("quotient map is onto")
    };
    let generics = generic_subgroups(k)?;
    let lifts: Vec<usize> = generics.iter().map(|s| lift((1, s.j))).collect();

    let mut fixed = Vec::new();
    for chi in 0..chars.len() {
        let fixed_by: Vec<usize> = generics
            .iter()
            .zip(&lifts)
            .filter(|(_, &h)| chars.act(g, h, chi) == chi)
            .map(|(s, _)| s.j)
            .collect();
        if !fixed_by.is_empty() {
            fixed.push(FixedCharacter {
                character: chi,
                exponents: chars.chars()[chi].clone(),
                fixed_by,
            });
        }
    }

    // subgroup of Â generated by the fixed characters
    let e = chars.root_order();
    let mut span: BTreeSet<Vec<u32>> = BTreeSet::new();
    span.insert(vec![0; a.len()]);
    loop {
        let mut grew = false;
        for v in span.clone() {
            for f in &fixed {
                let w: Vec<u32> = v.iter().zip(&f.exponents).map(|(x, y)| (x + y) % e).collect();
                grew |= span.insert(w);
            }
        }
        if !grew {
            break;
        }
    }
    let generated_order = span.len();

    // induce a fixed character that is nontrivial when possible
    let pick = fixed
        .iter()
        .find(|f| f.exponents.iter().any(|&x| x != 0))
        .or(fixed.first());
    let induced = match pick {
        Some(f) => Some(induce_fixed(g, &chars, &quotient, f.character, f.fixed_by[0], &lift)?),
        None => None,
    };
    Ok(FaithfulnessCertificate {
        faithful: generated_order == a.len(),
        derived_order: a.len(),
        fixed,
        generated_order,
        induced,
    })
}

/// `Ind_{ψ⁻¹(H)}^G χ̃` for `H = <x y^j>`, where `χ̃(a h₀^t) = χ(a) λ^t` and
/// `h₀` lifts `x y^j`; `λ` ranges over roots with `λ^K = χ(h₀^K)`.
fn induce_fixed(
    g: &FiniteGroup,
    chars: &crate::groups::SubgroupCharacters,
    quotient: &[Vec<usize>],
    chi: usize,
    j: usize,
    lift: &dyn Fn((usize, usize)) -> usize,
) -> Result<InducedWitness> {
    let k = g.gen_order();
    let e = chars.root_order();
    let h0 = lift((1, j));
    let h0k = g.pow(h0, k as i64);
    let target = chars.value_exp(chi, h0k);
    let sub: Vec<usize> = (0..g.order())
        .filter(|&h| quotient[h][1] == (quotient[h][0] * j) % k)
        .collect();
    for lambda in (0..e).filter(|&l| (l as usize * k) % e as usize == target as usize) {
        let values: Vec<u32> = sub
            .iter()
            .map(|&h| {
                let t = quotient[h][0];
                let a = g.mul(h, g.pow(h0, -(t as i64)));
                (chars.value_exp(chi, a) + lambda * t as u32) % e
            })
            .collect();
        if let Ok(rep) = induce(g, &sub, &values) {
            let mats: Vec<_> = g.generators().iter().map(|&x| rep.matrix(x)).collect();
            let quasiflat = is_quasiflat(&mats, k)?.quasiflat;
            let spectra = mats
                .iter()
                .map(|m| {
                    let mut ev: Vec<Complex64> = crate::linalg::eigenvalues(m);
                    ev.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
                    ev.iter().map(|z| [z.re, z.im]).collect()
                })
                .collect();
            return Ok(InducedWitness {
                character: chi,
                j,
                dim: rep.dim(),
                spectra,
                quasiflat,
            });
        }
    }
    Err(QfError::NotExtendable(
        "fixed character has no extension to the preimage of H".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{build_dihedral, build_heisenberg, build_meta144};
    use crate::modelspace::enumerate_components;

    fn order_k_subgroups_oracle(k: usize) -> usize {
        // subgroups generated by a single nonzero vector, counted once each
        let mut seen = BTreeSet::new();
        for a in 0..k {
            for b in 0..k {
                if (a, b) == (0, 0) {
                    continue;
                }
                let mut s: Vec<(usize, usize)> = (0..k).map(|t| (t * a % k, t * b % k)).collect();
                s.sort_unstable();
                let meets_axis = s.iter().any(|&(x, y)| (x, y) != (0, 0) && (x == 0 || y == 0));
                if !meets_axis {
                    seen.insert(s);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn generic_subgroup_counts() {
        for k in [2usize, 3, 5, 7] {
            let gs = generic_subgroups(k).unwrap();
            assert_eq!(gs.len(), k - 1);
            assert_eq!(gs.len(), order_k_subgroups_oracle(k));
        }
        assert!(matches!(generic_subgroups(4), Err(QfError::CompositeK(4))));
    }

    #[test]
    fn kernels() {
        let g = build_dihedral(4).unwrap();
        let comps = enumerate_components(&g, 2).unwrap();
        assert!(kernel_intersection(&g, &comps).faithful);
        let xp: Vec<_> = comps.iter().filter(|c| c.label() == "X+").cloned().collect();
        let cert = kernel_intersection(&g, &xp);
        assert!(!cert.faithful);
        let xy = g.mul(g.generators()[0], g.generators()[1]);
        assert_eq!(cert.intersection, g.subgroup_generated(&[xy]));
        let m = build_meta144();
        assert!(kernel_intersection(&m, &enumerate_components(&m, 3).unwrap()).faithful);
    }

    #[test]
    fn certificates() {
        for g in [build_meta144(), build_heisenberg(3).unwrap()] {
            let cert = inner_faithfulness_certificate(&g).unwrap();
            assert!(cert.faithful, "{}", g.name());
            let w = cert.induced.unwrap();
            assert!(w.quasiflat);
            assert_eq!(w.dim, 3);
        }
        let m = build_meta144();
        let cert = inner_faithfulness_certificate(&m).unwrap();
        assert_eq!(cert.fixed.iter().filter(|f| f.exponents.iter().any(|&x| x != 0)).count(), 6);
    }
}
