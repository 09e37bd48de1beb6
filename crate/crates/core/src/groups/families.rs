use super::{Family, FiniteGroup, Meta144Data};
use crate::error::{QfError, Result};

pub fn is_prime(k: usize) -> bool {
    k >= 2 && (2..).take_while(|d| d * d <= k).all(|d| !k.is_multiple_of(d))
}

/// `D_n` of order `2n`, `n` even, generated by the two reflections `x = s`
/// and `y = r s` whose product `x y = r^{-1}` has order `n`.
pub fn build_dihedral(n: usize) -> Result<FiniteGroup> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(QfError::InvalidGroup(format!(
            "dihedral:{n} requires an even n >= 4"
        )));
    }
    // (k, f) stands for r^k s^f
    let elements: Vec<(usize, u8)> = (0..2u8)
        .flat_map(|f| (0..n).map(move |k| (k, f)))
        .collect();
    let product = move |a: &(usize, u8), b: &(usize, u8)| {
        let k = if a.1 == 0 { a.0 + b.0 } else { a.0 + n - b.0 };
        (k % n, a.1 ^ b.1)
    };
    FiniteGroup::from_elements(
        format!("dihedral:{n}"),
        Family::Dihedral { n },
        elements,
        product,
        &(0, 0),
        &[(0, 1), (1, 1)],
        |&(k, f)| match (k, f) {
            (0, 0) => "e".to_string(),
            (0, 1) => "s".to_string(),
            (k, 0) => format!("r^{k}"),
            (k, _) => format!("r^{k}s"),
        },
    )
}

/// Heisenberg group of order `K^3`: triples `(a, b, c)` mod `K` with
/// `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`; `g_1 = (1,0,0)`, `g_2 = (0,1,0)`.
pub fn build_heisenberg(k: usize) -> Result<FiniteGroup> {
    if !is_prime(k) {
        return Err(QfError::CompositeK(k));
    }
    let elements: Vec<(usize, usize, usize)> = (0..k)
        .flat_map(|a| (0..k).flat_map(move |b| (0..k).map(move |c| (a, b, c))))
        .collect();
    let product = move |x: &(usize, usize, usize), y: &(usize, usize, usize)| {
        (
            (x.0 + y.0) % k,
            (x.1 + y.1) % k,
            (x.2 + y.2 + x.0 * y.1) % k,
        )
    };
    FiniteGroup::from_elements(
        format!("heisenberg:{k}"),
        Family::Heisenberg { k },
        elements,
        product,
        &(0, 0, 0),
        &[(1, 0, 0), (0, 1, 0)],
        |&(a, b, c)| format!("({a},{b},{c})"),
    )
}

/// `Z_K^M` with its standard generators.
pub fn build_abelian(k: usize, m: usize) -> Result<FiniteGroup> {
    if k == 0 || m == 0 {
        return Err(QfError::InvalidGroup("abelian:KxM needs K, M >= 1".into()));
    }
    let order = k.checked_pow(m as u32).filter(|&o| o <= 10_000).ok_or_else(|| {
        QfError::TooLarge(format!("abelian:{k}x{m} has more than 10^4 elements"))
    })?;
    let elements: Vec<Vec<usize>> = (0..order)
        .map(|mut idx| {
            let mut v = vec![0; m];
            for slot in v.iter_mut() {
                *slot = idx % k;
                idx /= k;
            }
            v
        })
        .collect();
    let gens: Vec<Vec<usize>> = (0..m)
        .map(|i| {
            let mut v = vec![0; m];
            v[i] = 1 % k;
            v
        })
        .collect();
    FiniteGroup::from_elements(
        format!("abelian:{k}x{m}"),
        Family::Abelian { k, m },
        elements,
        move |a: &Vec<usize>, b: &Vec<usize>| a.iter().zip(b).map(|(x, y)| (x + y) % k).collect(),
        &vec![0; m],
        &gens,
        |v| format!("{v:?}"),
    )
}

/// 2×2 matrices over F_2 packed as 4 bits; bit `2i + j` is entry `(i, j)`.
pub(crate) type F2Mat = u8;

pub(crate) fn f2_get(a: F2Mat, i: usize, j: usize) -> u8 {
    (a >> (2 * i + j)) & 1
}

fn f2_from(e: [[u8; 2]; 2]) -> F2Mat {
    e[0][0] | (e[0][1] << 1) | (e[1][0] << 2) | (e[1][1] << 3)
}

pub(crate) fn f2_mul(a: F2Mat, b: F2Mat) -> F2Mat {
    let mut e = [[0u8; 2]; 2];
    for (i, row) in e.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = (f2_get(a, i, 0) & f2_get(b, 0, j)) ^ (f2_get(a, i, 1) & f2_get(b, 1, j));
        }
    }
    f2_from(e)
}

fn f2_transpose(a: F2Mat) -> F2Mat {
    f2_from([[f2_get(a, 0, 0), f2_get(a, 1, 0)], [f2_get(a, 0, 1), f2_get(a, 1, 1)]])
}

/// `m = [[0,1],[1,1]]` over F_2, of multiplicative order 3.
pub(crate) const M_F2: F2Mat = 0b1110;
pub(crate) const I_F2: F2Mat = 0b1001;

pub(crate) fn f2_pow(a: F2Mat, k: usize) -> F2Mat {
    (0..k).fold(I_F2, |acc, _| f2_mul(acc, a))
}

/// Action of `x^s z^t` on `a = Σ a_kl p_k ⊗ q_l`: `(m^s ⊗ m^t) a`, i.e. `m^s a (m^t)^T`.
pub(crate) fn meta_act(s: usize, t: usize, a: F2Mat) -> F2Mat {
    f2_mul(f2_mul(f2_pow(M_F2, s % 3), a), f2_transpose(f2_pow(M_F2, t % 3)))
}

type MetaElem = (F2Mat, usize, usize);

fn meta_product(x: &MetaElem, y: &MetaElem) -> MetaElem {
    (x.0 ^ meta_act(x.1, x.2, y.0), (x.1 + y.1) % 3, (x.2 + y.2) % 3)
}

fn meta_closure_size(gens: &[MetaElem]) -> usize {
    let mut seen = std::collections::HashSet::new();
    let id: MetaElem = (0, 0, 0);
    seen.insert(id);
    let mut stack = vec![id];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = meta_product(&x, g);
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen.len()
}

/// `(Z_2^2 ⊗ Z_2^2) ⋊ Z_3^2` of order 144. The complement `H = <x, z>` acts on
/// `A = Z_2^4` through `m ⊗ I` and `I ⊗ m`. Since `H` itself is abelian the
/// second generator is taken as `y = a0 · z` with the least `a0` for which
/// `x, y` generate the whole group.
pub fn build_meta144() -> FiniteGroup {
    let x: MetaElem = (0, 1, 0);
    let a0 = (0..16u8)
        .find(|&a0| meta_closure_size(&[x, (a0, 0, 1)]) == 144)
        .expect("some offset generates the full group");
    let y: MetaElem = (a0, 0, 1);
    let elements: Vec<MetaElem> = (0..16u8)
        .flat_map(|a| (0..3).flat_map(move |s| (0..3).map(move |t| (a, s, t))))
        .collect();
    let a_elems = (0..16usize).map(|a| a * 9).collect();
    let h_elems = (0..9usize).collect();
    FiniteGroup::from_elements(
        "meta144".to_string(),
        Family::Meta144(Meta144Data {
            a_elems,
            h_elems,
            a0,
        }),
        elements,
        meta_product,
        &(0, 0, 0),
        &[x, y],
        |&(a, s, t)| {
            format!(
                "(a=[{}{};{}{}],h=({s},{t}))",
                f2_get(a, 0, 0),
                f2_get(a, 0, 1),
                f2_get(a, 1, 0),
                f2_get(a, 1, 1)
            )
        },
    )
    .expect("meta144 construction is closed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_basics() {
        let d4 = build_dihedral(4).unwrap();
        assert_eq!(d4.order(), 8);
        assert_eq!(d4.gen_order(), 2);
        let (x, y) = (d4.generators()[0], d4.generators()[1]);
        assert_eq!(d4.mul(x, x), d4.identity());
        assert_eq!(d4.mul(y, y), d4.identity());
        assert_eq!(d4.elem_order(d4.mul(x, y)), 4);
        assert_eq!(build_dihedral(6).unwrap().num_classes(), 6);
        assert!(build_dihedral(5).is_err());
        assert!(build_dihedral(2).is_err());
    }

    #[test]
    fn heisenberg_basics() {
        let h = build_heisenberg(3).unwrap();
        assert_eq!(h.order(), 27);
        let (g1, g2) = (h.generators()[0], h.generators()[1]);
        let c = h.commutator(g1, g2);
        assert_ne!(c, h.identity());
        assert_eq!(h.elem_order(c), 3);
        assert_eq!(h.mul(c, g1), h.mul(g1, c));
        assert_eq!(h.mul(c, g2), h.mul(g2, c));
        let h2 = build_heisenberg(2).unwrap();
        assert_eq!(h2.order(), 8);
        assert_eq!(h2.num_classes(), 5);
        assert!(matches!(build_heisenberg(4), Err(QfError::CompositeK(4))));
        assert!(build_heisenberg(1).is_err());
    }

    #[test]
    fn abelian_basics() {
        let g = build_abelian(2, 2).unwrap();
        assert_eq!(g.order(), 4);
        assert!(g.is_abelian());
        assert_eq!(build_abelian(3, 2).unwrap().num_classes(), 9);
        assert_eq!(build_abelian(1, 1).unwrap().order(), 1);
    }

    #[test]
    fn m_has_order_three() {
        assert_ne!(M_F2, I_F2);
        assert_ne!(f2_mul(M_F2, M_F2), I_F2);
        assert_eq!(f2_pow(M_F2, 3), I_F2);
        // 1 + m + m^2 = 0 over F_2, so every lift of z has order 3
        assert_eq!(I_F2 ^ M_F2 ^ f2_pow(M_F2, 2), 0);
    }

    #[test]
    fn meta144_structure() {
        let g = build_meta144();
        assert_eq!(g.order(), 144);
        assert_eq!(g.gen_order(), 3);
        let derived = g.derived_subgroup();
        assert_eq!(derived.len(), 16);
        assert!(g.is_abelian_set(&derived));
        assert!(derived.iter().all(|&a| a == g.identity() || g.elem_order(a) == 2));
        let crate::groups::Family::Meta144(data) = g.family() else {
            panic!()
        };
        let mut a_sorted = data.a_elems.clone();
        a_sorted.sort_unstable();
        assert_eq!(a_sorted, derived);
        // conjugation by x acts as m ⊗ I
        let x = g.generators()[0];
        for (bits, &a) in data.a_elems.iter().enumerate() {
            let image = g.conjugate(x, a);
            assert_eq!(image, data.a_elems[meta_act(1, 0, bits as u8) as usize]);
        }
    }
}
