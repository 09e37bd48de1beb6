use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use super::{Family, FiniteGroup};
use crate::cyclotomic::Cyclo;
use crate::error::{QfError, Result};
use crate::linalg::{root_of_unity, CMat};

/// A representation in which every group element acts by a permutation of the
/// basis times roots of unity: `ρ(g) e_t = ζ^{phase[g][t]} e_{perm[g][t]}`,
/// with `ζ = exp(2πi / root_order)`.
///
/// All representations constructed here (linear characters, inductions from
/// linear characters, and their direct sums) have this shape, so characters can
/// be evaluated exactly in `Q(ζ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialRep {
    dim: usize,
    root_order: u32,
    perm: Vec<usize>,
    phase: Vec<u32>,
}

impl MonomialRep {
    pub fn linear(root_order: u32, exps: &[u32]) -> Self {
        MonomialRep {
            dim: 1,
            root_order,
            perm: vec![0; exps.len()],
            phase: exps.iter().map(|&e| e % root_order).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn root_order(&self) -> u32 {
        self.root_order
    }

    pub fn group_order(&self) -> usize {
        self.perm.len() / self.dim.max(1)
    }

    /// Image basis index and phase exponent of `ρ(g) e_t`.
    pub fn action(&self, g: usize, t: usize) -> (usize, u32) {
        let i = g * self.dim + t;
        (self.perm[i], self.phase[i])
    }

    pub fn matrix(&self, g: usize) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for t in 0..self.dim {
            let (s, ph) = self.action(g, t);
            m[(s, t)] = root_of_unity(self.root_order as usize, ph as i64);
        }
        m
    }

    pub fn character_exact(&self, g: usize) -> Cyclo {
        Cyclo::sum_of_roots(
            self.root_order,
            (0..self.dim).filter_map(|t| {
                let (s, ph) = self.action(g, t);
                (s == t).then_some(ph as i64)
            }),
        )
    }

    pub fn is_linear(&self) -> bool {
        self.dim == 1
    }

    /// Exponent of the value of a linear representation.
    pub fn linear_exp(&self, g: usize) -> Option<u32> {
        self.is_linear().then(|| self.phase[g])
    }

    pub fn direct_sum(parts: &[&MonomialRep]) -> MonomialRep {
        assert!(!parts.is_empty());
        let root_order = parts[0].root_order;
        let n = parts[0].group_order();
        assert!(parts
            .iter()
            .all(|p| p.root_order == root_order && p.group_order() == n));
        let dim: usize = parts.iter().map(|p| p.dim).sum();
        let mut perm = Vec::with_capacity(n * dim);
        let mut phase = Vec::with_capacity(n * dim);
        for g in 0..n {
            let mut off = 0;
            for p in parts {
                for t in 0..p.dim {
                    let (s, ph) = p.action(g, t);
                    perm.push(off + s);
                    phase.push(ph);
                }
                off += p.dim;
            }
        }
        MonomialRep {
            dim,
            root_order,
            perm,
            phase,
        }
    }

    pub fn class_function(&self, g: &FiniteGroup) -> ClassFunction {
        ClassFunction::from_exact(
            (0..g.num_classes())
                .map(|c| self.character_exact(g.class_rep(c)))
                .collect(),
        )
    }

    /// `max ‖ρ(a)ρ(b) − ρ(ab)‖` over the given pairs, using dense matrices.
    pub fn homomorphism_residual(&self, g: &FiniteGroup, pairs: &[(usize, usize)]) -> f64 {
        pairs
            .iter()
            .map(|&(a, b)| {
                let lhs = self.matrix(a) * self.matrix(b);
                crate::linalg::max_abs_diff(&lhs, &self.matrix(g.mul(a, b)))
            })
            .fold(0.0, f64::max)
    }
}

/// Values per conjugacy class, optionally with exact cyclotomic values.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassFunction {
    values: Vec<Complex64>,
    exact: Option<Vec<Cyclo>>,
}

impl ClassFunction {
    pub fn from_values(values: Vec<Complex64>) -> Self {
        ClassFunction {
            values,
            exact: None,
        }
    }

    pub fn from_exact(exact: Vec<Cyclo>) -> Self {
        ClassFunction {
            values: exact.iter().map(Cyclo::to_complex).collect(),
            exact: Some(exact),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn exact(&self) -> Option<&[Cyclo]> {
        self.exact.as_deref()
    }

    pub fn at(&self, class: usize) -> Complex64 {
        self.values[class]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scale(&self, q: &BigRational) -> ClassFunction {
        match &self.exact {
            Some(ex) => ClassFunction::from_exact(ex.iter().map(|c| c.scale(q)).collect()),
            None => {
                let f = num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN);
                ClassFunction::from_values(self.values.iter().map(|v| v * f).collect())
            }
        }
    }

    pub fn add(&self, other: &ClassFunction) -> ClassFunction {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => {
                ClassFunction::from_exact(a.iter().zip(b).map(|(x, y)| x.add(y)).collect())
            }
            _ => ClassFunction::from_values(
                self.values
                    .iter()
                    .zip(&other.values)
                    .map(|(x, y)| x + y)
                    .collect(),
            ),
        }
    }

    pub fn zero_like(&self) -> ClassFunction {
        match &self.exact {
            Some(ex) => ClassFunction::from_exact(
                ex.iter().map(|c| Cyclo::zero(c.order())).collect(),
            ),
            None => ClassFunction::from_values(vec![Complex64::zero(); self.values.len()]),
        }
    }

    /// `(1/|G|) Σ_g f(g) conj(h(g))`.
    pub fn inner(&self, other: &ClassFunction, g: &FiniteGroup) -> Complex64 {
        let n = g.order() as f64;
        g.classes()
            .iter()
            .enumerate()
            .map(|(c, cls)| self.values[c] * other.values[c].conj() * cls.len() as f64)
            .sum::<Complex64>()
            / n
    }
}

#[derive(Clone, Debug)]
pub struct Irrep {
    label: String,
    rep: MonomialRep,
    character: ClassFunction,
}

impl Irrep {
    pub fn new(label: String, rep: MonomialRep, g: &FiniteGroup) -> Self {
        let character = rep.class_function(g);
        Irrep {
            label,
            rep,
            character,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn rep(&self) -> &MonomialRep {
        &self.rep
    }

    pub fn character(&self) -> &ClassFunction {
        &self.character
    }

    pub fn matrix(&self, g: usize) -> CMat {
        self.rep.matrix(g)
    }

    pub fn generator_matrices(&self, g: &FiniteGroup) -> Vec<CMat> {
        g.generators().iter().map(|&x| self.rep.matrix(x)).collect()
    }
}

/// All linear characters, as exponent vectors of `ζ_exponent`, found by
/// assigning roots of unity to the generators and extending along the Cayley
/// graph; inconsistent assignments are discarded.
pub fn linear_characters(g: &FiniteGroup) -> Vec<Vec<u32>> {
    let e = g.exponent() as u32;
    let gens = g.generators();
    let k = g.gen_order() as u32;
    let step = e / k.max(1);
    let m = gens.len();
    let total = (k as usize).pow(m as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let vals: Vec<u32> = (0..m)
            .map(|_| {
                let v = (c as u32 % k) * step;
                c /= k as usize;
                v
            })
            .collect();
        if let Some(chi) = extend_on_generators(g, &vals) {
            out.push(chi);
        }
    }
    out
}

fn extend_on_generators(g: &FiniteGroup, gen_exps: &[u32]) -> Option<Vec<u32>> {
    let e = g.exponent() as u32;
    let n = g.order();
    let mut val: Vec<Option<u32>> = vec![None; n];
    val[g.identity()] = Some(0);
    let mut stack = vec![g.identity()];
    while let Some(x) = stack.pop() {
        let vx = val[x].unwrap();
        for (i, &gen) in g.generators().iter().enumerate() {
            let y = g.mul(x, gen);
            let vy = (vx + gen_exps[i]) % e;
            match val[y] {
                Some(v) if v != vy => return None,
                Some(_) => {}
                None => {
                    val[y] = Some(vy);
                    stack.push(y);
                }
            }
        }
    }
    val.into_iter().collect()
}

/// Induces the linear character `chi` (exponents of `ζ_exponent`, aligned with
/// the sorted element list `sub`) from the subgroup `sub` up to `g`.
pub fn induce(g: &FiniteGroup, sub: &[usize], chi: &[u32]) -> Result<MonomialRep> {
    let n = g.order();
    let e = g.exponent() as u32;
    if sub.len() != chi.len() || sub.is_empty() {
        return Err(QfError::Invalid("character length mismatch".into()));
    }
    if !g.is_subgroup(sub) {
        return Err(QfError::NotSubgroup("induction source".into()));
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &s) in sub.iter().enumerate() {
        pos[s] = i;
    }
    for (i, &a) in sub.iter().enumerate() {
        for (j, &b) in sub.iter().enumerate() {
            if (chi[i] + chi[j]) % e != chi[pos[g.mul(a, b)]] % e {
                return Err(QfError::NotExtendable(
                    "character is not multiplicative on the subgroup".into(),
                ));
            }
        }
    }
    // left coset representatives
    let mut coset_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for t in 0..n {
        if coset_of[t] == usize::MAX {
            for &s in sub {
                coset_of[g.mul(t, s)] = reps.len();
            }
            reps.push(t);
        }
    }
    let dim = reps.len();
    let mut perm = vec![0; n * dim];
    let mut phase = vec![0; n * dim];
    for x in 0..n {
        for (j, &t) in reps.iter().enumerate() {
            let y = g.mul(x, t);
            let jp = coset_of[y];
            let s = g.mul(g.inv(reps[jp]), y);
            perm[x * dim + j] = jp;
            phase[x * dim + j] = chi[pos[s]] % e;
        }
    }
    Ok(MonomialRep {
        dim,
        root_order: e,
        perm,
        phase,
    })
}

/// Cyclic subgroup `<c>` with the character `c^k ↦ ζ_ord^{jk}`.
fn cyclic_character(g: &FiniteGroup, c: usize, j: i64) -> (Vec<usize>, Vec<u32>) {
    let ord = g.elem_order(c);
    let e = g.exponent() as i64;
    let step = e / ord as i64;
    let mut pairs: Vec<(usize, u32)> = (0..ord as i64)
        .map(|k| (g.pow(c, k), ((j * k * step).rem_euclid(e)) as u32))
        .collect();
    pairs.sort_unstable();
    pairs.into_iter().unzip()
}

fn linear_label(g: &FiniteGroup, chi: &[u32]) -> String {
    let e = g.exponent() as u32;
    let k = g.gen_order() as u32;
    let parts: Vec<String> = g
        .generators()
        .iter()
        .map(|&x| format!("{}", chi[x] / (e / k)))
        .collect();
    format!("xi({})", parts.join(","))
}

fn linear_irreps(g: &FiniteGroup) -> Vec<Irrep> {
    let e = g.exponent() as u32;
    linear_characters(g)
        .into_iter()
        .map(|chi| Irrep::new(linear_label(g, &chi), MonomialRep::linear(e, &chi), g))
        .collect()
}

/// Complete list of irreducible representations: closed forms for the
/// abelian, dihedral and Heisenberg families, the little-group method for the
/// order-144 group.
pub fn irreps(g: &FiniteGroup) -> Result<Vec<Irrep>> {
    match g.family() {
        Family::Abelian { .. } => Ok(linear_irreps(g)),
        Family::Dihedral { n } => {
            let mut out = linear_irreps(g);
            let (x, y) = (g.generators()[0], g.generators()[1]);
            let rot = g.mul(x, y);
            for j in 1..(*n as i64 / 2) {
                let (sub, chi) = cyclic_character(g, rot, j);
                out.push(Irrep::new(format!("rho{j}"), induce(g, &sub, &chi)?, g));
            }
            Ok(out)
        }
        Family::Heisenberg { k } => {
            let mut out = linear_irreps(g);
            let (g1, g2) = (g.generators()[0], g.generators()[1]);
            let z = g.commutator(g1, g2);
            let step = (g.exponent() / k) as u32;
            for l in 1..*k {
                // N = <g2, z>, character g2^b z^c ↦ w^{l c}
                let mut pairs = Vec::new();
                for b in 0..*k as i64 {
                    for c in 0..*k as i64 {
                        let elem = g.mul(g.pow(g2, b), g.pow(z, c));
                        let v = ((l as i64 * c).rem_euclid(*k as i64)) as u32 * step;
                        pairs.push((elem, v));
                    }
                }
                pairs.sort_unstable();
                let (sub, chi): (Vec<usize>, Vec<u32>) = pairs.into_iter().unzip();
                out.push(Irrep::new(format!("pi{l}"), induce(g, &sub, &chi)?, g));
            }
            Ok(out)
        }
        Family::Meta144(data) => {
            let a: Vec<usize> = sorted(&data.a_elems);
            let h: Vec<usize> = sorted(&data.h_elems);
            super::little_group_irreps(g, &a, &h)
        }
    }
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{build_abelian, build_dihedral, build_heisenberg, build_meta144};

    fn all_groups() -> Vec<FiniteGroup> {
        vec![
            build_abelian(2, 2).unwrap(),
            build_abelian(3, 2).unwrap(),
            build_dihedral(4).unwrap(),
            build_dihedral(6).unwrap(),
            build_dihedral(8).unwrap(),
            build_heisenberg(2).unwrap(),
            build_heisenberg(3).unwrap(),
            build_meta144(),
        ]
    }

    fn dims(g: &FiniteGroup) -> Vec<usize> {
        let mut d: Vec<usize> = irreps(g).unwrap().iter().map(Irrep::dim).collect();
        d.sort_unstable();
        d
    }

    #[test]
    fn dimension_censuses() {
        assert_eq!(dims(&build_dihedral(4).unwrap()), vec![1, 1, 1, 1, 2]);
        assert_eq!(dims(&build_abelian(2, 2).unwrap()), vec![1; 4]);
        let mut heis = vec![1; 9];
        heis.extend([3, 3]);
        assert_eq!(dims(&build_heisenberg(3).unwrap()), heis);
        let mut meta = vec![1; 9];
        meta.extend([3; 6]);
        meta.push(9);
        assert_eq!(dims(&build_meta144()), meta);
    }

    #[test]
    fn completeness_and_orthogonality() {
        for g in all_groups() {
            let irr = irreps(&g).unwrap();
            let sum_sq: usize = irr.iter().map(|r| r.dim() * r.dim()).sum();
            assert_eq!(sum_sq, g.order(), "{}", g.name());
            assert_eq!(irr.len(), g.num_classes(), "{}", g.name());
            for (i, a) in irr.iter().enumerate() {
                for (j, b) in irr.iter().enumerate() {
                    let ip = a.character().inner(b.character(), &g);
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((ip.re - expect).abs() < 1e-10 && ip.im.abs() < 1e-10);
                }
            }
            // column orthogonality: Σ dim χ(g) = 0 exactly for g ≠ e
            for c in 0..g.num_classes() {
                let col = irr.iter().fold(Cyclo::zero(g.exponent() as u32), |acc, r| {
                    acc.add(&r.character().exact().unwrap()[c].scale(
                        &BigRational::from_integer((r.dim() as i64).into()),
                    ))
                });
                if c == g.identity_class() {
                    assert_eq!(col.as_rational().unwrap(), BigRational::from_integer((g.order() as i64).into()));
                } else {
                    assert!(col.is_zero(), "{} class {c}", g.name());
                }
            }
        }
    }

    #[test]
    fn generator_matrices_are_unitary_homomorphisms() {
        for g in all_groups() {
            let n = g.order();
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            for &a in g.generators() {
                for &b in g.generators() {
                    pairs.push((a, b));
                }
            }
            let mut s = 99u64;
            for _ in 0..200 {
                s = crate::linalg::derive_seed(s, 3);
                pairs.push(((s % n as u64) as usize, ((s >> 32) % n as u64) as usize));
            }
            for r in irreps(&g).unwrap() {
                for m in r.generator_matrices(&g) {
                    assert!(crate::linalg::unitarity_residual(&m) < 1e-12);
                }
                assert!(r.rep().homomorphism_residual(&g, &pairs) < 1e-12);
            }
        }
    }

    #[test]
    fn induce_rejects_non_characters() {
        let g = build_dihedral(4).unwrap();
        let rot = g.mul(g.generators()[0], g.generators()[1]);
        let (sub, mut chi) = cyclic_character(&g, rot, 1);
        chi[1] = (chi[1] + 1) % g.exponent() as u32;
        assert!(matches!(
            induce(&g, &sub, &chi),
            Err(QfError::NotExtendable(_))
        ));
        assert!(matches!(
            induce(&g, &[g.identity(), g.generators()[0], rot], &[0, 0, 0]),
            Err(QfError::NotSubgroup(_))
        ));
    }
}
