//! The ten acceptance checks as library functions, shared by the `acceptance`
//! test target and `qf reproduce-all`.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::groups::{build_abelian, build_dihedral, build_heisenberg, build_meta144, FiniteGroup};
use crate::haarcalc::{
    atom_at_one, gram_law_check, growth_series, moment_estimates, word_moments_exact, GrowthSystem,
    WeightedModel,
};
use crate::linalg;
use crate::modelspace::{enumerate_components, sparse_latin_squares, ComponentKind, Permutation};
use crate::stationarity::exact::{q, Q};
use crate::stationarity::{
    inner_faithfulness_certificate, kernel_intersection, orbit_sum_table, solve_weights,
    verify_weights,
};
use crate::twist::{
    all_words, fiber_model, find_cocycle, idempotence_rows, is_central_monomial, state_rows,
    stationarity_rows, ExponentMatrix, Letter, ModelState,
};

pub const DEFAULT_SEED: u64 = 20_240_617;

/// Outcome of one criterion. `seconds` is excluded from serialization so
/// that reports are reproducible byte for byte.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub details: Vec<String>,
    #[serde(skip)]
    pub seconds: f64,
}

struct Checks {
    passed: bool,
    details: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self {
            passed: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: String) {
        self.passed &= ok;
        self.details.push(format!("[{}] {what}", if ok { "ok" } else { "FAIL" }));
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "dihedral stationarity"),
    (2, "heisenberg(3) stationarity"),
    (3, "meta144 non-stationarity"),
    (4, "inner faithfulness"),
    (5, "gram-law identity"),
    (6, "exact moments and atom at 1"),
    (7, "monte carlo moment consistency"),
    (8, "O_2^-1 fiber model"),
    (9, "sparse latin squares"),
    (10, "growth series"),
];

/// Runs criterion `id` (1 to 10). Hard errors become failed checks.
pub fn run_criterion(id: u8, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let mut c = Checks::new();
    let outcome = match id {
        1 => dihedral(&mut c),
        2 => heisenberg(&mut c),
        3 => meta144(&mut c),
        4 => faithfulness(&mut c),
        5 => gram(&mut c, seed),
        6 => atoms(&mut c),
        7 => monte_carlo(&mut c, seed),
        8 => twisted(&mut c, seed),
        9 => latin(&mut c),
        10 => growth(&mut c),
        _ => Err(crate::QfError::Invalid(format!("no criterion {id}"))),
    };
    if let Err(e) = outcome {
        c.check(false, format!("error: {e}"));
    }
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map_or("unknown", |(_, n)| n);
    CriterionReport {
        id,
        name: name.to_string(),
        passed: c.passed,
        details: c.details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, seed)).collect()
}

fn max_residual_for(g: &FiniteGroup, weight: impl Fn(&ComponentKind) -> Q) -> Result<f64> {
    let comps = enumerate_components(g, g.gen_order())?;
    let w: Vec<Q> = comps.iter().map(|c| weight(c.kind())).collect();
    Ok(verify_weights(g, &comps, &w)?.max_residual)
}

fn dihedral(c: &mut Checks) -> Result<()> {
    for n in [4usize, 6, 8] {
        let g = build_dihedral(n)?;
        let comps = enumerate_components(&g, 2)?;
        c.check(
            comps.len() == n / 2 + 1,
            format!("D_{n}: {} components (expected {})", comps.len(), n / 2 + 1),
        );
        let rep = solve_weights(&g, &comps)?;
        c.check(rep.feasible, format!("D_{n}: solver feasible = {}", rep.feasible));
        let res = max_residual_for(&g, |k| match k {
            ComponentKind::Loose { .. } => q(1, n as i64),
            _ => q(2, n as i64),
        })?;
        c.check(res < 1e-12, format!("D_{n}: residual of X_chi = 2/n, X+- = 1/n is {res:.1e}"));
    }
    Ok(())
}

fn heisenberg(c: &mut Checks) -> Result<()> {
    let g = build_heisenberg(3)?;
    let comps = enumerate_components(&g, 3)?;
    let loose: Vec<_> = comps
        .iter()
        .filter(|x| matches!(x.kind(), ComponentKind::Loose { .. }))
        .collect();
    let solid: Vec<_> = comps
        .iter()
        .filter(|x| matches!(x.kind(), ComponentKind::Solid))
        .collect();
    c.check(
        comps.len() == 8 && loose.len() == 6 && solid.len() == 2,
        format!("{} components: {} loose, {} solid", comps.len(), loose.len(), solid.len()),
    );
    let res = max_residual_for(&g, |k| match k {
        ComponentKind::Loose { .. } => q(1, 18),
        _ => q(1, 3),
    })?;
    c.check(res < 1e-12, format!("residual of loose 1/18, solid 1/3 is {res:.1e}"));
    let ld: Vec<usize> = loose.iter().map(|x| x.commutant_dim()).collect();
    let sd: Vec<usize> = solid.iter().map(|x| x.commutant_dim()).collect();
    c.check(
        ld.iter().all(|&d| d == 3) && sd.iter().all(|&d| d == 1),
        format!("commutant dims: loose {ld:?}, solid {sd:?}"),
    );
    Ok(())
}

fn meta144(c: &mut Checks) -> Result<()> {
    let g = build_meta144();
    let comps = enumerate_components(&g, 3)?;
    let loose = comps
        .iter()
        .filter(|x| matches!(x.kind(), ComponentKind::Loose { .. }))
        .count();
    let solid = comps
        .iter()
        .filter(|x| matches!(x.kind(), ComponentKind::Solid))
        .count();
    c.check(
        loose == 6 && solid == 6 && comps.len() == 12,
        format!("{loose} loose + {solid} solid components"),
    );
    let table = orbit_sum_table(&g)?;
    c.check(
        table.values == vec![vec![-1, -1], vec![3, -1], vec![-1, 3]],
        format!("orbit sums {:?}", table.values),
    );
    let rep = solve_weights(&g, &comps)?;
    let cert_ok = rep.certificate.as_ref().is_some_and(|cert| cert.verify());
    c.check(
        !rep.feasible && cert_ok,
        format!("feasible = {}, certificate verified = {cert_ok}", rep.feasible),
    );
    Ok(())
}

fn faithfulness(c: &mut Checks) -> Result<()> {
    let groups = [
        build_dihedral(4)?,
        build_dihedral(6)?,
        build_heisenberg(3)?,
        build_meta144(),
    ];
    for g in &groups {
        let comps = enumerate_components(g, g.gen_order())?;
        let cert = kernel_intersection(g, &comps);
        c.check(cert.faithful, format!("{}: joint kernel {:?}", g.name(), cert.labels));
    }
    let cert = inner_faithfulness_certificate(&build_meta144())?;
    c.check(
        cert.faithful,
        format!(
            "meta144: fixed characters generate {} of {}",
            cert.generated_order, cert.derived_order
        ),
    );
    let roots: Vec<Complex64> = (0..3).map(|t| linalg::root_of_unity(3, t)).collect();
    let spectra_ok = cert.induced.as_ref().is_some_and(|w| {
        w.spectra.iter().all(|spec| {
            spec.len() == 3
                && roots.iter().all(|r| {
                    spec.iter()
                        .filter(|z| (Complex64::new(z[0], z[1]) - r).norm() < 1e-8)
                        .count()
                        == 1
                })
        })
    });
    c.check(spectra_ok, "induced generators have spectrum {1, w, w^2}".into());
    Ok(())
}

fn d4_stationary_model() -> Result<(FiniteGroup, WeightedModel)> {
    let g = build_dihedral(4)?;
    let model = WeightedModel::stationary(&g, 2)?;
    Ok((g, model))
}

fn gram(c: &mut Checks, seed: u64) -> Result<()> {
    let (_, model) = d4_stationary_model()?;
    let samples = (0..3u64)
        .map(|s| model.sample(linalg::derive_seed(seed, s)))
        .collect::<Result<Vec<_>>>()?;
    for p in 1..=3 {
        for r in 1..=2 {
            let chk = gram_law_check(&samples, p, r)?;
            c.check(
                chk.abs_diff < 1e-10,
                format!("p={p} r={r}: |T - Gram| = {:.1e}", chk.abs_diff),
            );
        }
    }
    Ok(())
}

fn atoms(c: &mut Checks) -> Result<()> {
    let z = word_moments_exact(&build_abelian(2, 2)?, 200)?;
    let ex = z.exact.clone().unwrap_or_default();
    c.check(
        ex.get(1).map(String::as_str) == Some("1/2") && ex.get(2).map(String::as_str) == Some("3/8"),
        format!("Z_2^2: m_1 = {}, m_2 = {}", ex[1], ex[2]),
    );
    let a = atom_at_one(&z, 200)?;
    c.check((a - 0.25).abs() < 1e-3, format!("Z_2^2: atom at R=200 is {a:.6}"));
    let d = word_moments_exact(&build_dihedral(4)?, 400)?;
    let b = atom_at_one(&d, 400)?;
    c.check((b - 0.125).abs() < 1e-3, format!("D_4: atom at R=400 is {b:.6}"));
    Ok(())
}

fn monte_carlo(c: &mut Checks, seed: u64) -> Result<()> {
    let (g, model) = d4_stationary_model()?;
    let est = moment_estimates(&g, &model, 2, 10_000, seed)?;
    let e = &est[1];
    c.check(
        e.z_score() <= 3.0,
        format!(
            "p=2: estimate {:.6} vs exact {:.6} (stderr {:.1e}, z = {:.2})",
            e.estimate,
            e.exact,
            e.stderr,
            e.z_score()
        ),
    );
    Ok(())
}

fn random_word(rng: &mut impl Rng, max_len: usize) -> Vec<Letter> {
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| (rng.random_range(0..2), rng.random_range(0..2)))
        .collect()
}

fn twisted(c: &mut Checks, seed: u64) -> Result<()> {
    let sigma = find_cocycle()?;
    c.check(true, format!("cocycle B = {:?}, reversed = {}", sigma.bits, sigma.reversed));
    let mut rng = linalg::rng_from_seed(linalg::derive_seed(seed, 8));
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let theta = rng.random_range(0.01..std::f64::consts::PI - 0.01);
        worst = worst.max(fiber_model(theta, &sigma)?.residuals().max());
    }
    c.check(worst < 1e-12, format!("relations at 10 angles: {worst:.1e}"));

    let state = ModelState::new(&sigma, 8)?;
    let err = |rows: &[crate::twist::StateRow]| rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
    let short = err(&stationarity_rows(&state, 4)?);
    let words: Vec<Vec<Letter>> = (0..500).map(|_| random_word(&mut rng, 6)).collect();
    let long = err(&state_rows(&state, &words)?);
    c.check(short < 1e-10, format!("stationarity, all words up to length 4: {short:.1e}"));
    c.check(long < 1e-10, format!("stationarity, 500 random words up to length 6: {long:.1e}"));
    let idem = err(&idempotence_rows(&state, 4)?);
    c.check(idem < 1e-9, format!("idempotence up to length 4: {idem:.1e}"));

    let mut central = 0.0f64;
    for _ in 0..20 {
        let eps = rng.random_range(0..2u32);
        let mut e: Vec<Vec<u32>> = (0..2)
            .map(|_| (0..2).map(|_| rng.random_range(0..3)).collect())
            .collect();
        if (e[0][0] + e[0][1]) % 2 != eps {
            e[0][1] += 1;
        }
        if (e[0][0] + e[1][0]) % 2 != eps {
            e[1][0] += 1;
        }
        if (e[1][0] + e[1][1]) % 2 != eps {
            e[1][1] += 1;
        }
        let em = ExponentMatrix::new(e)?;
        debug_assert!(is_central_monomial(&em));
        for _ in 0..5 {
            let m = fiber_model(rng.random_range(0.01..1.56), &sigma)?;
            let z = m.word_operator(&em.word());
            for w in all_words(1) {
                let v = m.v(w[0].0, w[0].1);
                central = central.max(linalg::max_abs(&(&z * v - v * &z)));
            }
        }
    }
    c.check(central < 1e-11, format!("central monomials commute: {central:.1e}"));
    Ok(())
}

/// Exhaustive count of `K`-tuples whose rows are pairwise disjoint
/// permutations, by enumerating all `|G|^K` tuples.
fn brute_force_latin(perms: &[Permutation], k: usize) -> usize {
    let n = perms.len();
    (0..n.pow(k as u32))
        .filter(|&t| {
            let idx: Vec<usize> = (0..k).map(|s| (t / n.pow(s as u32)) % n).collect();
            (0..perms[0].len()).all(|point| {
                let mut col: Vec<usize> = idx.iter().map(|&s| perms[s][point]).collect();
                col.sort_unstable();
                col.windows(2).all(|w| w[0] != w[1])
            })
        })
        .count()
}

fn latin(c: &mut Checks) -> Result<()> {
    let z2: Vec<Permutation> = vec![vec![0, 1], vec![1, 0]];
    let z4: Vec<Permutation> = (0..4).map(|s| (0..4).map(|i| (i + s) % 4).collect()).collect();
    let klein: Vec<Permutation> = (0..4).map(|s| (0..4).map(|i| i ^ s).collect()).collect();
    for (name, perms, expect) in [("Z_2 in S_2", z2, 2), ("Z_4 in S_4", z4, 24), ("Z_2^2 in S_4", klein, 24)] {
        let k = perms[0].len();
        let got = sparse_latin_squares(&perms, k)?.len();
        let brute = brute_force_latin(&perms, k);
        c.check(
            got == expect && brute == expect,
            format!("{name}: {got} (exhaustive {brute}, expected {expect})"),
        );
    }
    Ok(())
}

fn growth(c: &mut Checks) -> Result<()> {
    let z = growth_series(&GrowthSystem::Integers, 50, 1_000)?;
    let ok = z.iter().enumerate().all(|(n, &v)| v == 2 * n + 1);
    c.check(ok, format!("Z: v_50 = {}", z[50]));
    let groups = [
        build_abelian(2, 2)?,
        build_dihedral(4)?,
        build_dihedral(6)?,
        build_dihedral(8)?,
        build_heisenberg(3)?,
        build_meta144(),
    ];
    for g in &groups {
        let v = growth_series(&GrowthSystem::Finite(g), g.order(), g.order())?;
        let last = *v.last().unwrap_or(&0);
        c.check(last == g.order(), format!("{}: saturates at {last} of {}", g.name(), g.order()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_latin_oracle_agrees_on_small_cases() {
        let z3: Vec<Permutation> = (0..3).map(|s| (0..3).map(|i| (i + s) % 3).collect()).collect();
        for k in 1..=3 {
            assert_eq!(brute_force_latin(&z3, k), sparse_latin_squares(&z3, k).unwrap().len());
        }
    }

    #[test]
    fn unknown_criterion_fails() {
        let r = run_criterion(11, DEFAULT_SEED);
        assert!(!r.passed);
        assert_eq!(r.name, "unknown");
    }
}
