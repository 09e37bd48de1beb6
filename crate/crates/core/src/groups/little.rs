//! Little-group (Mackey) construction for `G = A ⋊ H` with `A` abelian.

use super::irreps::{induce, Irrep};
use super::{Family, FiniteGroup};
use crate::error::{QfError, Result};

/// The character group of an abelian subgroup, as exponent vectors of
/// `ζ_root_order` aligned with the sorted element list, sorted lexicographically.
#[derive(Clone, Debug)]
pub struct SubgroupCharacters {
    elems: Vec<usize>,
    pos: Vec<usize>,
    chars: Vec<Vec<u32>>,
    root_order: u32,
}

impl SubgroupCharacters {
    pub fn elems(&self) -> &[usize] {
        &self.elems
    }

    pub fn chars(&self) -> &[Vec<u32>] {
        &self.chars
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn root_order(&self) -> u32 {
        self.root_order
    }

    pub fn contains(&self, g: usize) -> bool {
        self.pos.get(g).is_some_and(|&p| p != usize::MAX)
    }

    /// Exponent of `χ_chi(g)`; `g` must lie in the subgroup.
    pub fn value_exp(&self, chi: usize, g: usize) -> u32 {
        self.chars[chi][self.pos[g]]
    }

    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.chars.binary_search_by(|c| c.as_slice().cmp(exps)).ok()
    }

    /// `(h·χ)(a) = χ(h⁻¹ a h)`.
    pub fn act(&self, g: &FiniteGroup, h: usize, chi: usize) -> usize {
        let hi = g.inv(h);
        let img: Vec<u32> = self
            .elems
            .iter()
            .map(|&a| self.value_exp(chi, g.conjugate(hi, a)))
            .collect();
        self.index_of(&img).expect("conjugation permutes characters")
    }
}

/// Enumerates all characters of the abelian subgroup `elems` with values in
/// `ζ_{exp(G)}`.
pub fn abelian_characters(g: &FiniteGroup, elems: &[usize]) -> Result<SubgroupCharacters> {
    let mut elems = elems.to_vec();
    elems.sort_unstable();
    elems.dedup();
    if !g.is_subgroup(&elems) {
        return Err(QfError::NotSubgroup("character source".into()));
    }
    if !g.is_abelian_set(&elems) {
        return Err(QfError::Invalid("subgroup is not abelian".into()));
    }
    let e = g.exponent() as u32;
    let mut pos = vec![usize::MAX; g.order()];
    for (i, &x) in elems.iter().enumerate() {
        pos[x] = i;
    }
    // greedy generating set
    let mut gens = Vec::new();
    let mut span = vec![g.identity()];
    for &x in &elems {
        if !span.contains(&x) {
            gens.push(x);
            span = g.subgroup_generated(&gens);
        }
    }
    let orders: Vec<usize> = gens.iter().map(|&x| g.elem_order(x)).collect();
    let total: usize = orders.iter().product();
    let mut chars = Vec::new();
    for code in 0..total {
        let mut c = code;
        let vals: Vec<u32> = orders
            .iter()
            .map(|&o| {
                let v = (c % o) as u32 * (e / o as u32);
                c /= o;
                v
            })
            .collect();
        if let Some(chi) = extend(g, &elems, &pos, &gens, &vals) {
            chars.push(chi);
        }
    }
    chars.sort();
    chars.dedup();
    if chars.len() != elems.len() {
        return Err(QfError::Invalid(format!(
            "found {} characters for an abelian group of order {}",
            chars.len(),
            elems.len()
        )));
    }
    Ok(SubgroupCharacters {
        elems,
        pos,
        chars,
        root_order: e,
    })
}

fn extend(
    g: &FiniteGroup,
    elems: &[usize],
    pos: &[usize],
    gens: &[usize],
    vals: &[u32],
) -> Option<Vec<u32>> {
    let e = g.exponent() as u32;
    let mut val: Vec<Option<u32>> = vec![None; elems.len()];
    val[pos[g.identity()]] = Some(0);
    let mut stack = vec![g.identity()];
    while let Some(x) = stack.pop() {
        let vx = val[pos[x]].unwrap();
        for (i, &gen) in gens.iter().enumerate() {
            let y = g.mul(x, gen);
            let vy = (vx + vals[i]) % e;
            match val[pos[y]] {
                Some(v) if v != vy => return None,
                Some(_) => {}
                None => {
                    val[pos[y]] = Some(vy);
                    stack.push(y);
                }
            }
        }
    }
    val.into_iter().collect()
}

/// An `H`-orbit of characters of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualOrbit {
    /// Character indices, ascending; the first is the representative.
    pub members: Vec<usize>,
    /// Sorted elements of `H` fixing the representative.
    pub isotropy: Vec<usize>,
}

impl DualOrbit {
    pub fn representative(&self) -> usize {
        self.members[0]
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }
}

fn check_complement(g: &FiniteGroup, a: &[usize], h: &[usize]) -> Result<()> {
    if !g.is_subgroup(a) || !g.is_subgroup(h) {
        return Err(QfError::NotSubgroup("A or H".into()));
    }
    if !g.is_normal(a) || !g.is_abelian_set(a) {
        return Err(QfError::Invalid("A must be abelian and normal".into()));
    }
    let meet = a.iter().filter(|x| h.contains(x)).count();
    if meet != 1 || a.len() * h.len() != g.order() {
        return Err(QfError::Invalid("H is not a complement of A".into()));
    }
    Ok(())
}

/// Orbits of `H` on the characters of `A`, ordered by representative.
pub fn dual_orbit_decomposition(
    g: &FiniteGroup,
    a: &[usize],
    h: &[usize],
) -> Result<(SubgroupCharacters, Vec<DualOrbit>)> {
    check_complement(g, a, h)?;
    let chars = abelian_characters(g, a)?;
    let mut h = h.to_vec();
    h.sort_unstable();
    let mut seen = vec![false; chars.len()];
    let mut orbits = Vec::new();
    for chi in 0..chars.len() {
        if seen[chi] {
            continue;
        }
        let mut members: Vec<usize> = h.iter().map(|&x| chars.act(g, x, chi)).collect();
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            seen[m] = true;
        }
        let isotropy = h
            .iter()
            .copied()
            .filter(|&x| chars.act(g, x, chi) == chi)
            .collect();
        orbits.push(DualOrbit { members, isotropy });
    }
    Ok((chars, orbits))
}

/// Extends `χ_O` to `A·H_χ` by `a h ↦ χ(a) ρ(h)` and induces to `G`.
/// `rho` holds exponents aligned with the sorted isotropy list.
pub fn little_group_induce(
    g: &FiniteGroup,
    chars: &SubgroupCharacters,
    orbit: &DualOrbit,
    rho: &[u32],
    label: String,
) -> Result<Irrep> {
    let chi = orbit.representative();
    let e = g.exponent() as u32;
    let mut pairs = Vec::with_capacity(chars.elems().len() * orbit.isotropy.len());
    for &a in chars.elems() {
        for (k, &hh) in orbit.isotropy.iter().enumerate() {
            pairs.push((g.mul(a, hh), (chars.value_exp(chi, a) + rho[k]) % e));
        }
    }
    pairs.sort_unstable();
    let (sub, psi): (Vec<usize>, Vec<u32>) = pairs.into_iter().unzip();
    let rep = induce(g, &sub, &psi).map_err(|err| match err {
        QfError::NotExtendable(m) | QfError::NotSubgroup(m) => QfError::NotExtendable(m),
        other => other,
    })?;
    Ok(Irrep::new(label, rep, g))
}

/// All irreducibles of `A ⋊ H` for `H` abelian, ordered by orbit then by
/// isotropy character.
pub fn little_group_irreps(g: &FiniteGroup, a: &[usize], h: &[usize]) -> Result<Vec<Irrep>> {
    let (chars, orbits) = dual_orbit_decomposition(g, a, h)?;
    let names = orbit_names(g, &chars, &orbits);
    let mut out = Vec::new();
    for (orbit, name) in orbits.iter().zip(&names) {
        let iso = abelian_characters(g, &orbit.isotropy)?;
        for (k, rho) in iso.chars().iter().enumerate() {
            out.push(little_group_induce(
                g,
                &chars,
                orbit,
                rho,
                format!("({name},rho{k})"),
            )?);
        }
    }
    Ok(out)
}

/// Orbit names: `O0` for the trivial character, `O9`-style size tags for
/// free orbits, and for size-3 orbits `O1` / `O2` according to whether the
/// representative is fixed by `xy` or by `xy²`.
fn orbit_names(g: &FiniteGroup, chars: &SubgroupCharacters, orbits: &[DualOrbit]) -> Vec<String> {
    let gens = g.generators();
    let (xy, xyy) = if gens.len() == 2 {
        let xy = g.mul(gens[0], gens[1]);
        (Some(xy), Some(g.mul(xy, gens[1])))
    } else {
        (None, None)
    };
    let fixes = |x: Option<usize>, o: &DualOrbit| {
        x.is_some_and(|x| chars.act(g, x, o.representative()) == o.representative())
    };
    orbits
        .iter()
        .enumerate()
        .map(|(i, o)| match o.size() {
            1 if i == 0 => "O0".to_string(),
            s if s == g.gen_order() && fixes(xy, o) => "O1".to_string(),
            s if s == g.gen_order() && fixes(xyy, o) => "O2".to_string(),
            s => format!("O{i}:{s}"),
        })
        .collect()
}

/// Dual orbit data of the order-144 group with `A` the `Z_2^4` factor and
/// `H` the `Z_3^2` complement.
pub fn meta144_dual_orbits(g: &FiniteGroup) -> Result<(SubgroupCharacters, Vec<DualOrbit>)> {
    let Family::Meta144(data) = g.family() else {
        return Err(QfError::Unsupported("meta144 orbit data".into()));
    };
    let mut a = data.a_elems.clone();
    a.sort_unstable();
    let mut h = data.h_elems.clone();
    h.sort_unstable();
    dual_orbit_decomposition(g, &a, &h)
}

/// Name of each orbit as used in irrep labels.
pub fn meta144_orbit_names(g: &FiniteGroup) -> Result<Vec<String>> {
    let (chars, orbits) = meta144_dual_orbits(g)?;
    Ok(orbit_names(g, &chars, &orbits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::build_meta144;

    #[test]
    fn meta144_orbit_census() {
        let g = build_meta144();
        let (chars, orbits) = meta144_dual_orbits(&g).unwrap();
        assert_eq!(chars.len(), 16);
        let mut sizes: Vec<usize> = orbits.iter().map(DualOrbit::size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 3, 3, 9]);
        let total: usize = orbits.iter().map(DualOrbit::size).sum();
        assert_eq!(total, 16);
        for o in &orbits {
            assert_eq!(o.size() * o.isotropy.len(), 9);
        }
        let names = meta144_orbit_names(&g).unwrap();
        assert!(names.contains(&"O1".to_string()));
        assert!(names.contains(&"O2".to_string()));
    }

    #[test]
    fn size_three_irreps_vanish_on_generators() {
        let g = build_meta144();
        let irr = crate::groups::irreps(&g).unwrap();
        let (x, y) = (g.generators()[0], g.generators()[1]);
        let threes: Vec<_> = irr.iter().filter(|r| r.dim() == 3).collect();
        assert_eq!(threes.len(), 6);
        for r in threes {
            assert!(r.rep().character_exact(x).is_zero());
            assert!(r.rep().character_exact(y).is_zero());
        }
        let trivial = &irr[0];
        assert_eq!(trivial.dim(), 1);
        assert!((0..g.order()).all(|h| trivial.rep().linear_exp(h) == Some(0)));
    }

    #[test]
    fn rejects_non_complement() {
        let g = build_meta144();
        let Family::Meta144(data) = g.family() else { panic!() };
        let mut a = data.a_elems.clone();
        a.sort_unstable();
        assert!(dual_orbit_decomposition(&g, &a, &[g.identity()]).is_err());
    }
}
