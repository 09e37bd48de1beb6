//! Finite groups given by multiplication tables, the example families, and
//! their complete irreducible representation data.

mod families;
mod irreps;
mod little;
mod spec;

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{QfError, Result};

pub use families::{build_abelian, build_dihedral, build_heisenberg, build_meta144, is_prime};
pub use irreps::{
    induce, irreps, linear_characters, ClassFunction, Irrep, MonomialRep,
};
pub use little::{
    abelian_characters, dual_orbit_decomposition, little_group_induce, little_group_irreps,
    meta144_dual_orbits, meta144_orbit_names, DualOrbit, SubgroupCharacters,
};
pub use spec::GroupSpec;

/// Which closed-form construction produced a group; selects the irrep route.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Abelian { k: usize, m: usize },
    Dihedral { n: usize },
    Heisenberg { k: usize },
    Meta144(Meta144Data),
}

/// Bookkeeping for the order-144 group `(Z_2^2 ⊗ Z_2^2) ⋊ Z_3^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Meta144Data {
    /// Elements of the normal subgroup `A`, indexed by the 4-bit coefficient
    /// matrix `a` (bit `2k + l` is the coefficient of `p_k ⊗ q_l`).
    pub a_elems: Vec<usize>,
    /// Elements of the complement `H`, indexed by `3 s + t` for `x^s z^t`.
    pub h_elems: Vec<usize>,
    /// Offset of the second generator: `y = a0 · z` with `z ∈ H`.
    pub a0: u8,
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: String,
    family: Family,
    mul: Vec<u32>,
    inv: Vec<usize>,
    identity: usize,
    generators: Vec<usize>,
    gen_order: usize,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    elem_order: Vec<usize>,
    exponent: usize,
    labels: Vec<String>,
}

impl FiniteGroup {
    /// Materialises the multiplication table of a group given as an explicit
    /// element list and a product closure.
    pub(crate) fn from_elements<T, F, L>(
        name: String,
        family: Family,
        elements: Vec<T>,
        product: F,
        identity: &T,
        generators: &[T],
        label: L,
    ) -> Result<Self>
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, &T) -> T,
        L: Fn(&T) -> String,
    {
        let n = elements.len();
        if n == 0 || n > 10_000 {
            return Err(QfError::InvalidGroup(format!("order {n} outside 1..=10000")));
        }
        let index: HashMap<T, usize> = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        if index.len() != n {
            return Err(QfError::InvalidGroup("duplicate elements".into()));
        }
        let lookup = |t: &T| -> Result<usize> {
            index
                .get(t)
                .copied()
                .ok_or_else(|| QfError::InvalidGroup("product leaves the element set".into()))
        };
        let mut mul = vec![0u32; n * n];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                mul[i * n + j] = lookup(&product(a, b))? as u32;
            }
        }
        let identity = lookup(identity)?;
        let mut inv = vec![usize::MAX; n];
        for (i, slot) in inv.iter_mut().enumerate() {
            *slot = (0..n)
                .find(|&j| mul[i * n + j] as usize == identity)
                .ok_or_else(|| QfError::InvalidGroup("element without inverse".into()))?;
        }
        let generators = generators.iter().map(lookup).collect::<Result<Vec<_>>>()?;
        let labels = elements.iter().map(label).collect();

        let mut g = FiniteGroup {
            name,
            family,
            mul,
            inv,
            identity,
            generators,
            gen_order: 0,
            classes: Vec::new(),
            class_of: Vec::new(),
            elem_order: Vec::new(),
            exponent: 1,
            labels,
        };
        g.elem_order = (0..n).map(|x| g.compute_order(x)).collect();
        g.exponent = g
            .elem_order
            .iter()
            .fold(1usize, |acc, &o| num_integer::lcm(acc, o));
        let gen_orders: Vec<usize> = g.generators.iter().map(|&x| g.elem_order[x]).collect();
        g.gen_order = gen_orders.first().copied().unwrap_or(1);
        if gen_orders.iter().any(|&o| o != g.gen_order) {
            return Err(QfError::InvalidGroup(format!(
                "generators have unequal orders {gen_orders:?}"
            )));
        }
        let classes = conjugacy_classes(&g);
        let mut class_of = vec![0; n];
        for (c, cls) in classes.iter().enumerate() {
            for &x in cls {
                class_of[x] = c;
            }
        }
        g.classes = classes;
        g.class_of = class_of;
        Ok(g)
    }

    fn compute_order(&self, x: usize) -> usize {
        let mut y = x;
        let mut k = 1;
        while y != self.identity {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn order(&self) -> usize {
        self.inv.len()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order() + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Common order `K` of the distinguished generators.
    pub fn gen_order(&self) -> usize {
        self.gen_order
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub fn class_rep(&self, c: usize) -> usize {
        self.classes[c][0]
    }

    pub fn identity_class(&self) -> usize {
        self.class_of[self.identity]
    }

    pub fn elem_order(&self, g: usize) -> usize {
        self.elem_order[g]
    }

    /// Least common multiple of all element orders.
    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn pow(&self, g: usize, k: i64) -> usize {
        let o = self.elem_order[g] as i64;
        let e = k.rem_euclid(o);
        let mut acc = self.identity;
        for _ in 0..e {
            acc = self.mul(acc, g);
        }
        acc
    }

    /// Class of `rep(c)^k`.
    pub fn class_pow(&self, c: usize, k: i64) -> usize {
        self.class_of[self.pow(self.class_rep(c), k)]
    }

    /// `a b a^{-1} b^{-1}`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(a, b);
        let ab_ai = self.mul(ab, self.inv(a));
        self.mul(ab_ai, self.inv(b))
    }

    pub fn conjugate(&self, h: usize, a: usize) -> usize {
        self.mul(self.mul(h, a), self.inv(h))
    }

    /// Product of a word in the generators; entries are `(generator, power)`.
    pub fn word(&self, letters: &[(usize, i64)]) -> usize {
        letters.iter().fold(self.identity, |acc, &(i, k)| {
            self.mul(acc, self.pow(self.generators[i], k))
        })
    }

    /// Sorted element list of the subgroup generated by `gens`.
    pub fn subgroup_generated(&self, gens: &[usize]) -> Vec<usize> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut stack = vec![self.identity];
        seen[self.identity] = true;
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..n).filter(|&i| seen[i]).collect()
    }

    pub fn is_subgroup(&self, elems: &[usize]) -> bool {
        let mut member = vec![false; self.order()];
        for &e in elems {
            member[e] = true;
        }
        member[self.identity]
            && elems.iter().all(|&a| {
                member[self.inv(a)] && elems.iter().all(|&b| member[self.mul(a, b)])
            })
    }

    pub fn is_normal(&self, elems: &[usize]) -> bool {
        let mut member = vec![false; self.order()];
        for &e in elems {
            member[e] = true;
        }
        (0..self.order()).all(|g| elems.iter().all(|&a| member[self.conjugate(g, a)]))
    }

    pub fn is_abelian_set(&self, elems: &[usize]) -> bool {
        elems
            .iter()
            .all(|&a| elems.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_abelian(&self) -> bool {
        self.num_classes() == self.order()
    }

    pub fn derived_subgroup(&self) -> Vec<usize> {
        let n = self.order();
        let mut comms: Vec<usize> = Vec::new();
        let mut seen = vec![false; n];
        for a in 0..n {
            for b in 0..n {
                let c = self.commutator(a, b);
                if !seen[c] {
                    seen[c] = true;
                    comms.push(c);
                }
            }
        }
        self.subgroup_generated(&comms)
    }

    /// `Some(v)` with `v[g] ∈ Z_K^M` when the generators extend to a
    /// homomorphism onto `Z_K^M` sending `g_i` to the `i`-th basis vector.
    pub fn abelian_quotient_map(&self) -> Option<Vec<Vec<usize>>> {
        let k = self.gen_order;
        let m = self.generators.len();
        let n = self.order();
        let mut img: Vec<Option<Vec<usize>>> = vec![None; n];
        img[self.identity] = Some(vec![0; m]);
        let mut stack = vec![self.identity];
        while let Some(x) = stack.pop() {
            let vx = img[x].clone().unwrap();
            for (i, &g) in self.generators.iter().enumerate() {
                let y = self.mul(x, g);
                let mut vy = vx.clone();
                vy[i] = (vy[i] + 1) % k;
                match &img[y] {
                    Some(existing) if *existing != vy => return None,
                    Some(_) => {}
                    None => {
                        img[y] = Some(vy);
                        stack.push(y);
                    }
                }
            }
        }
        img.into_iter().collect()
    }
}

/// Brute-force conjugacy classes: identity class first, then classes in order of
/// their least element; each class sorted.
pub fn conjugacy_classes(g: &FiniteGroup) -> Vec<Vec<usize>> {
    let n = g.order();
    let mut assigned = vec![false; n];
    let mut classes = Vec::new();
    let mut order: Vec<usize> = vec![g.identity()];
    order.extend((0..n).filter(|&x| x != g.identity()));
    for x in order {
        if assigned[x] {
            continue;
        }
        let mut cls: Vec<usize> = (0..n).map(|h| g.conjugate(h, x)).collect();
        cls.sort_unstable();
        cls.dedup();
        for &y in &cls {
            assigned[y] = true;
        }
        classes.push(cls);
    }
    classes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_class_count(g: &FiniteGroup) -> usize {
        // independent route: count orbits by union-find over all conjugation pairs
        let n = g.order();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for h in 0..n {
            for x in 0..n {
                let y = g.conjugate(h, x);
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                if rx != ry {
                    parent[rx] = ry;
                }
            }
        }
        (0..n).filter(|&x| find(&mut parent, x) == x).count()
    }

    #[test]
    fn class_counts_match_brute_force() {
        let cases: Vec<(FiniteGroup, usize)> = vec![
            (build_dihedral(4).unwrap(), 5),
            (build_dihedral(6).unwrap(), 6),
            (build_abelian(3, 2).unwrap(), 9),
            (build_heisenberg(3).unwrap(), 11),
            (build_heisenberg(2).unwrap(), 5),
        ];
        for (g, expected) in cases {
            assert_eq!(g.num_classes(), expected, "{}", g.name());
            assert_eq!(brute_force_class_count(&g), expected, "{}", g.name());
            let total: usize = g.classes().iter().map(|c| c.len()).sum();
            assert_eq!(total, g.order());
            assert_eq!(g.classes()[0], vec![g.identity()]);
        }
    }

    #[test]
    fn table_axioms_hold() {
        for g in [
            build_dihedral(8).unwrap(),
            build_heisenberg(3).unwrap(),
            build_meta144(),
            build_abelian(4, 2).unwrap(),
        ] {
            let n = g.order();
            for a in 0..n {
                assert_eq!(g.mul(a, g.identity()), a);
                assert_eq!(g.mul(g.identity(), a), a);
                assert_eq!(g.mul(a, g.inv(a)), g.identity());
            }
            // associativity on a deterministic sample of triples
            let mut s = 12345u64;
            for _ in 0..2000 {
                s = crate::linalg::derive_seed(s, 1);
                let (a, b, c) = (
                    (s % n as u64) as usize,
                    ((s >> 20) % n as u64) as usize,
                    ((s >> 40) % n as u64) as usize,
                );
                assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
            }
            for &x in g.generators() {
                assert_eq!(g.elem_order(x), g.gen_order());
            }
        }
    }

    #[test]
    fn quotient_map_detects_abelianisation() {
        let d4 = build_dihedral(4).unwrap();
        let q = d4.abelian_quotient_map().unwrap();
        assert_eq!(q[d4.identity()], vec![0, 0]);
        let h = build_heisenberg(3).unwrap();
        assert!(h.abelian_quotient_map().is_some());
    }
}
