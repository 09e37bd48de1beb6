//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type CMat = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn root_of_unity(n: usize, k: i64) -> Complex64 {
    let ang = 2.0 * std::f64::consts::PI * (k.rem_euclid(n as i64) as f64) / n as f64;
    Complex64::from_polar(1.0, ang)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Mixes a base seed with a stream index; used to give every sample its own RNG
/// so that results do not depend on how work is split across threads.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix, with the phases of
/// `R`'s diagonal pushed back into `Q`.
pub fn haar_unitary_rng<R: Rng + ?Sized>(k: usize, rng: &mut R) -> CMat {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = CMat::from_fn(k, k, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..k {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..k {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_unitary(k: usize, seed: u64) -> CMat {
    let mut rng = rng_from_seed(seed);
    haar_unitary_rng(k, &mut rng)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a - b))
}

/// `max |U U* - I|`.
pub fn unitarity_residual(u: &CMat) -> f64 {
    let n = u.nrows();
    if u.ncols() != n {
        return f64::INFINITY;
    }
    max_abs(&(u * u.adjoint() - identity(n)))
}

pub fn hermitian_residual(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn mat_pow(m: &CMat, k: usize) -> CMat {
    let mut acc = identity(m.nrows());
    for _ in 0..k {
        acc = &acc * m;
    }
    acc
}

pub fn trace(m: &CMat) -> Complex64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Eigenvalues of a square complex matrix via the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Vec<Complex64> {
    let schur = m.clone().schur();
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Numerical rank from singular values, relative tolerance `tol`.
pub fn rank(m: &CMat, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax.max(1.0)).count()
}

/// Dimension of `{X : X A = A X for every A}`.
pub fn commutant_dim(mats: &[CMat], tol: f64) -> usize {
    let n = mats.first().map(|m| m.nrows()).unwrap_or(0);
    if n == 0 {
        return 0;
    }
    let id = identity(n);
    // vec(XA - AX) = (A^T ⊗ I - I ⊗ A) vec(X) in column-major vec.
    let blocks: Vec<CMat> = mats
        .iter()
        .map(|a| kron(&a.transpose(), &id) - kron(&id, a))
        .collect();
    let rows = blocks.len() * n * n;
    let mut big = CMat::zeros(rows, n * n);
    for (b, blk) in blocks.iter().enumerate() {
        big.view_mut((b * n * n, 0), (n * n, n * n)).copy_from(blk);
    }
    n * n - rank(&big, tol)
}

/// Block-diagonal direct sum.
pub fn direct_sum(blocks: &[CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((off, off), (k, k)).copy_from(b);
        off += k;
    }
    out
}

/// Rank-one projection onto a (not necessarily normalised) vector.
pub fn projection(v: &nalgebra::DVector<Complex64>) -> CMat {
    let n2 = v.norm_squared();
    if n2 == 0.0 {
        return CMat::zeros(v.len(), v.len());
    }
    (v * v.adjoint()) / Complex64::new(n2, 0.0)
}

/// `<a, b>` linear in the right argument.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
