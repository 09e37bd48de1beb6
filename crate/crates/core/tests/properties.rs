use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use qf_core::groups::{
    build_abelian, build_dihedral, build_heisenberg, build_meta144, irreps, FiniteGroup, Irrep,
};
use qf_core::haarcalc::{gram_law_check, tp_of_model, truncated_moment, word_moments_exact};
use qf_core::linalg::{self, CMat};
use qf_core::modelspace::{
    enumerate_components, fourier_magic, is_quasiflat, sample_point, ModelComponent,
};
use qf_core::stationarity::{kernel_intersection, solve_weights, verify_weights};
use qf_core::twist::{
    bidegree, cross_sign, find_cocycle, target_state, twist_sign, Bicharacter, Letter, ModelState,
};

struct Fixture {
    groups: Vec<FiniteGroup>,
    components: Vec<Vec<ModelComponent>>,
    irreps: Vec<Vec<Irrep>>,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let groups = vec![
            build_abelian(2, 2).unwrap(),
            build_dihedral(4).unwrap(),
            build_dihedral(6).unwrap(),
            build_heisenberg(3).unwrap(),
            build_meta144(),
        ];
        let components = groups
            .iter()
            .map(|g| enumerate_components(g, g.gen_order()).unwrap())
            .collect();
        let irreps = groups.iter().map(|g| irreps(g).unwrap()).collect();
        Fixture {
            groups,
            components,
            irreps,
        }
    })
}

fn twist_state() -> &'static ModelState {
    static S: OnceLock<ModelState> = OnceLock::new();
    S.get_or_init(|| ModelState::new(&find_cocycle().unwrap(), 10).unwrap())
}

fn sigma() -> &'static Bicharacter {
    twist_state().sigma()
}

fn letter() -> impl Strategy<Value = Letter> {
    (0usize..2, 0usize..2)
}

fn group_word(rep: &[CMat], letters: &[(usize, usize)]) -> CMat {
    letters.iter().fold(linalg::identity(rep[0].nrows()), |acc, &(i, e)| {
        acc * linalg::mat_pow(&rep[i], e)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn irreps_are_homomorphisms(gi in 0usize..5, a in 0usize..144, b in 0usize..144) {
        let g = &fixture().groups[gi];
        let (a, b) = (a % g.order(), b % g.order());
        for pi in &fixture().irreps[gi] {
            let lhs = pi.matrix(g.mul(a, b));
            let rhs = pi.matrix(a) * pi.matrix(b);
            prop_assert!(linalg::max_abs_diff(&lhs, &rhs) < 1e-10);
        }
    }

    #[test]
    fn column_orthogonality(gi in 0usize..5, h in 1usize..144) {
        let g = &fixture().groups[gi];
        let h = h % g.order();
        prop_assume!(h != g.identity());
        let s: Complex64 = fixture().irreps[gi]
            .iter()
            .map(|pi| pi.character().at(g.class_of(h)) * pi.dim() as f64)
            .sum();
        prop_assert!(s.norm() < 1e-10);
    }

    #[test]
    fn sampled_points_stay_quasiflat_and_magic(gi in 0usize..5, ci in 0usize..12, seed in any::<u64>()) {
        let comps = &fixture().components[gi];
        let c = &comps[ci % comps.len()];
        let point = sample_point(c, seed);
        prop_assert!(is_quasiflat(point.generators(), c.k()).unwrap().quasiflat);
        let model = fourier_magic(&point).unwrap();
        prop_assert!(model.magic_residual() < 1e-12);
        // the character is constant along the component
        let g = &fixture().groups[gi];
        for (idx, &x) in g.generators().iter().enumerate() {
            let t = linalg::trace(&point.generators()[idx]) / c.k() as f64;
            prop_assert!((t - c.trace().at(g.class_of(x))).norm() < 1e-10);
        }
    }

    #[test]
    fn tp_entries_bounded_by_one_over_k(gi in 0usize..4, ci in 0usize..12, seed in any::<u64>(), p in 1usize..3) {
        let comps = &fixture().components[gi];
        let c = &comps[ci % comps.len()];
        let model = fourier_magic(&sample_point(c, seed)).unwrap();
        let tp = tp_of_model(&model, p).unwrap();
        let bound = 1.0 / c.k() as f64 + 1e-12;
        prop_assert!(tp.matrix().iter().all(|z| z.norm() <= bound));
        if c.k() == 2 {
            prop_assert!(linalg::hermitian_residual(tp.matrix()) < 1e-12);
        }
    }

    #[test]
    fn tp_conjugation_reverses_indices(gi in 0usize..4, ci in 0usize..12, seed in any::<u64>(), p in 1usize..4, t in any::<u64>()) {
        let comps = &fixture().components[gi];
        let c = &comps[ci % comps.len()];
        let model = fourier_magic(&sample_point(c, seed)).unwrap();
        let tp = tp_of_model(&model, p).unwrap();
        let n = model.n();
        let dim = n.pow(p as u32) as u64;
        let digits = |mut x: u64| -> Vec<usize> {
            (0..p).map(|_| { let d = (x % n as u64) as usize; x /= n as u64; d }).collect()
        };
        let (rows, cols) = (digits(t % dim), digits((t / dim) % dim));
        let rev = |v: &[usize]| v.iter().rev().copied().collect::<Vec<_>>();
        let lhs = tp.entry(&rows, &cols).unwrap().conj();
        let rhs = tp.entry(&rev(&rows), &rev(&cols)).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn gram_identity_on_matched_samples(seed in any::<u64>(), p in 1usize..4, r in 1usize..4) {
        let comps = &fixture().components[1];
        let samples: Vec<_> = (0..2u64)
            .map(|s| {
                let c = &comps[(seed.wrapping_add(s) % comps.len() as u64) as usize];
                fourier_magic(&sample_point(c, linalg::derive_seed(seed, s))).unwrap()
            })
            .collect();
        let chk = gram_law_check(&samples, p, r).unwrap();
        prop_assert!(chk.abs_diff < 1e-10, "{:?}", chk);
        prop_assert!(chk.min_gram_eigenvalue > -1e-10);
    }

    /// Powers of `T_2` against powers of the normalised trace on the group
    /// element `g_i^k g_j^l`, using `ρ(g_i)^k = Σ_d w^{kd} P^{(i)}_{0d}`.
    #[test]
    fn truncated_moments_match_class_function_powers(
        gi in 1usize..4, ci in 0usize..8, seed in any::<u64>(),
        i in 0usize..2, j in 0usize..2, k in 0usize..3, l in 0usize..3, r in 1usize..4,
    ) {
        let comps = &fixture().components[gi];
        let c = &comps[ci % comps.len()];
        let kk = c.k();
        let point = sample_point(c, seed);
        let model = fourier_magic(&point).unwrap();
        let tp = tp_of_model(&model, 2).unwrap();
        let mut via_t = Complex64::new(0.0, 0.0);
        for d1 in 0..kk {
            for d2 in 0..kk {
                let coeff = linalg::root_of_unity(kk, (k * d1 + l * d2) as i64);
                let rows = [i * kk, j * kk];
                let cols = [i * kk + d1, j * kk + d2];
                via_t += coeff * truncated_moment(&tp, r, &rows, &cols).unwrap();
            }
        }
        let rho = group_word(point.generators(), &[(i, k), (j, l)]);
        let phi = linalg::trace(&rho) / kk as f64;
        prop_assert!((via_t - phi.powu(r as u32)).norm() < 1e-10);
    }

    #[test]
    fn weights_do_not_depend_on_component_order(gi in prop::sample::select(vec![1usize, 2, 3]), rot in 0usize..8) {
        let g = &fixture().groups[gi];
        let comps = &fixture().components[gi];
        let base = solve_weights(g, comps).unwrap();
        let mut perm: Vec<ModelComponent> = comps.clone();
        perm.rotate_left(rot % comps.len());
        perm.reverse();
        let other = solve_weights(g, &perm).unwrap();
        let mut a: Vec<String> = base.weights_exact.unwrap().iter().map(ToString::to_string).collect();
        let w_other = other.weights_exact.unwrap();
        let mut b: Vec<String> = w_other.iter().map(ToString::to_string).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
        let check = verify_weights(g, &perm, &w_other).unwrap();
        prop_assert!(check.exact_zero && check.max_residual < 1e-9);
        // stationary implies jointly faithful
        prop_assert!(kernel_intersection(g, comps).faithful);
    }

    #[test]
    fn moment_sequences_are_bounded(gi in 0usize..5, p_max in 1usize..30) {
        let m = word_moments_exact(&fixture().groups[gi], p_max).unwrap();
        prop_assert_eq!(m.values[0], 1.0);
        prop_assert!(m.values.iter().all(|v| v.abs() <= 1.0 && *v >= 0.0));
    }

    #[test]
    fn bicharacter_is_bimultiplicative(idx in 0u8..16, rev in any::<bool>(), a in 0u8..4, b in 0u8..4, c in 0u8..4) {
        let s = Bicharacter::from_index(idx, rev);
        let bits = |x: u8| [x >> 1, x & 1];
        let sum = |x: u8, y: u8| bits(x ^ y);
        prop_assert_eq!(s.eval(sum(a, b), bits(c)), s.eval(bits(a), bits(c)) * s.eval(bits(b), bits(c)));
        prop_assert_eq!(s.eval(bits(c), sum(a, b)), s.eval(bits(c), bits(a)) * s.eval(bits(c), bits(b)));
    }

    #[test]
    fn twist_sign_concatenates(x in prop::collection::vec(letter(), 0..6), y in prop::collection::vec(letter(), 0..6)) {
        let s = sigma();
        let xy: Vec<Letter> = x.iter().chain(&y).copied().collect();
        prop_assert_eq!(
            twist_sign(&xy, s),
            twist_sign(&x, s) * twist_sign(&y, s) * cross_sign(bidegree(&x), bidegree(&y), s)
        );
    }

    #[test]
    fn model_state_is_haar(w in prop::collection::vec(letter(), 0..8)) {
        let st = twist_state();
        let model = st.eval(&w).unwrap();
        let target: f64 = num_traits::ToPrimitive::to_f64(&target_state(&w, st.sigma()).unwrap()).unwrap();
        prop_assert!((model - target).norm() < 1e-10);
    }
}
