use std::collections::HashSet;

use crate::error::{QfError, Result};

/// A permutation of `{0, …, N-1}` in image form.
pub type Permutation = Vec<usize>;

fn compose(a: &[usize], b: &[usize]) -> Permutation {
    b.iter().map(|&x| a[x]).collect()
}

fn validate_group(perms: &[Permutation]) -> Result<()> {
    let n = perms.first().map(Vec::len).ok_or_else(|| {
        QfError::NotSubgroup("empty permutation list".into())
    })?;
    for p in perms {
        let mut seen = vec![false; n];
        if p.len() != n || p.iter().any(|&x| x >= n || std::mem::replace(&mut seen[x], true)) {
            return Err(QfError::Invalid("not a permutation of a common set".into()));
        }
    }
    let set: HashSet<&[usize]> = perms.iter().map(Vec::as_slice).collect();
    for a in perms {
        for b in perms {
            if !set.contains(compose(a, b).as_slice()) {
                return Err(QfError::NotSubgroup("not closed under composition".into()));
            }
        }
    }
    Ok(())
}

/// All `K`-tuples `(σ_1, …, σ_K)` of group elements (as indices into `perms`)
/// with `σ_1(i), …, σ_K(i)` distinct for every point `i`.
pub fn sparse_latin_squares(perms: &[Permutation], k: usize) -> Result<Vec<Vec<usize>>> {
    validate_group(perms)?;
    let size = (perms.len() as f64).powi(k as i32);
    if size > 1e6 {
        return Err(QfError::TooLarge(format!("|G|^K = {size:.0} exceeds 10^6")));
    }
    let n = perms[0].len();
    let mut out = Vec::new();
    let mut tuple = Vec::with_capacity(k);
    let mut used = vec![vec![false; n]; n];
    extend(perms, k, &mut tuple, &mut used, &mut out);
    Ok(out)
}

fn extend(
    perms: &[Permutation],
    k: usize,
    tuple: &mut Vec<usize>,
    used: &mut [Vec<bool>],
    out: &mut Vec<Vec<usize>>,
) {
    if tuple.len() == k {
        out.push(tuple.clone());
        return;
    }
    for (s, p) in perms.iter().enumerate() {
        if p.iter().enumerate().any(|(i, &x)| used[i][x]) {
            continue;
        }
        for (i, &x) in p.iter().enumerate() {
            used[i][x] = true;
        }
        tuple.push(s);
        extend(perms, k, tuple, used, out);
        tuple.pop();
        for (i, &x) in p.iter().enumerate() {
            used[i][x] = false;
        }
    }
}

/// Largest degree accepted for `symmetric:<n>`.
const MAX_SYMMETRIC: usize = 6;

fn all_permutations(n: usize) -> Vec<Permutation> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in all_permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Parses `cyclic:<n>`, `klein`, `symmetric:<n>`, or an explicit list of
/// one-based permutations in image form such as `1,2;2,1`. The result is in
/// zero-based image form; closure is checked by [`sparse_latin_squares`].
pub fn parse_perm_group(spec: &str) -> Result<Vec<Permutation>> {
    let bad = || QfError::Invalid(format!("unknown permutation group `{spec}`"));
    let s = spec.trim();
    let degree = |t: &str| t.trim().parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(bad);
    if s.eq_ignore_ascii_case("klein") {
        return Ok((0..4).map(|a| (0..4).map(|i| i ^ a).collect()).collect());
    }
    if let Some((head, tail)) = s.split_once(':') {
        return match head.to_ascii_lowercase().as_str() {
            "cyclic" => {
                let n = degree(tail)?;
                Ok((0..n).map(|a| (0..n).map(|i| (i + a) % n).collect()).collect())
            }
            "symmetric" => {
                let n = degree(tail)?;
                if n > MAX_SYMMETRIC {
                    return Err(QfError::TooLarge(format!("symmetric:{n} exceeds degree {MAX_SYMMETRIC}")));
                }
                Ok(all_permutations(n))
            }
            _ => Err(bad()),
        };
    }
    s.split(';')
        .map(|p| {
            p.split(',')
                .map(|x| x.trim().parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1).ok_or_else(bad))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let z2 = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(sparse_latin_squares(&z2, 2).unwrap().len(), 2);
        assert_eq!(sparse_latin_squares(&[vec![0]], 1).unwrap().len(), 1);
        let z4: Vec<Permutation> = (0..4).map(|s| (0..4).map(|i| (i + s) % 4).collect()).collect();
        assert_eq!(sparse_latin_squares(&z4, 4).unwrap().len(), 24);
    }

    #[test]
    fn rejects_non_groups() {
        let not_closed = vec![vec![0, 1, 2], vec![1, 2, 0]];
        assert!(matches!(
            sparse_latin_squares(&not_closed, 2),
            Err(QfError::NotSubgroup(_))
        ));
        assert!(sparse_latin_squares(&[vec![0, 0]], 1).is_err());
    }

    #[test]
    fn parses_named_and_explicit_groups() {
        assert_eq!(parse_perm_group("cyclic:2").unwrap(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(parse_perm_group("1,2;2,1").unwrap(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(parse_perm_group("klein").unwrap().len(), 4);
        let s3 = parse_perm_group("symmetric:3").unwrap();
        assert_eq!(s3.len(), 6);
        // S_3 on three points has 2 Latin squares per choice of first row
        assert_eq!(sparse_latin_squares(&s3, 3).unwrap().len(), 12);
        for bad in ["", "cyclic:0", "cyclic:x", "dihedral:4", "1,0;0,1", "symmetric:9"] {
            assert!(parse_perm_group(bad).is_err(), "{bad}");
        }
    }
}
