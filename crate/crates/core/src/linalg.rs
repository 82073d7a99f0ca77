//! Small dense complex linear-algebra helpers shared by the modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Replace `a` by its Hermitian part (a + a†)/2.
pub fn hermitize(a: &mut CMat) {
    let adj = a.adjoint();
    *a = (&*a + adj).scale(0.5);
}

/// Subtract (tr a / n)·I so the result is traceless.
pub fn remove_trace(a: &mut CMat) {
    let n = a.nrows();
    let t = a.trace() / n as f64;
    for i in 0..n {
        a[(i, i)] -= t;
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let mut h = a.clone();
    hermitize(&mut h);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn eigvalsh_real(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let sym = (a + a.transpose()) * 0.5;
    let mut v: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// exp(scale · a) for Hermitian `a`.
pub fn expm_hermitian(a: &CMat, scale: f64) -> CMat {
    let (vals, vecs) = eigh(a);
    let n = a.nrows();
    let d = CMat::from_diagonal(&CVec::from_iterator(n, vals.iter().map(|&l| c((scale * l).exp(), 0.0))));
    &vecs * d * vecs.adjoint()
}

/// Frobenius norm of a complex matrix.
pub fn fro(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product, conjugate-linear in the first argument.
pub fn dot(a: &CVec, b: &CVec) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Distance between the rays through `a` and `b` after optimal phase alignment.
///
/// Unlike `sqrt(1 - |<a|b>|^2)` this keeps full precision for nearby rays.
pub fn ray_distance(a: &CVec, b: &CVec) -> f64 {
    let na = vec_norm(a);
    let nb = vec_norm(b);
    let ov = dot(b, a);
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { ONE };
    let aa = a.unscale(na);
    let bb = b.unscale(nb) * phase;
    vec_norm(&(aa - bb))
}

/// Numerical rank of a set of complex vectors regarded as vectors in ℝ^{2d}.
pub fn real_rank(vectors: &[CVec], rel_tol: f64) -> usize {
    let sv = real_singular_values(vectors);
    match sv.first() {
        Some(&max) if max > 0.0 => sv.iter().filter(|&&s| s > rel_tol * max).count(),
        _ => 0,
    }
}

/// Singular values, descending, of the real `2d × k` matrix whose columns are
/// the real and imaginary parts of `vectors`.
pub fn real_singular_values(vectors: &[CVec]) -> Vec<f64> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let d = vectors[0].len();
    let m =
        DMatrix::<f64>::from_fn(
            2 * d,
            vectors.len(),
            |r, col| {
                if r < d {
                    vectors[col][r].re
                } else {
                    vectors[col][r - d].im
                }
            },
        );
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Complex Gram–Schmidt of `candidates` against an existing orthonormal set.
///
/// Vectors whose residual norm falls below `tol` are dropped. Two passes of
/// projection are used per candidate.
pub fn gram_schmidt(existing: &[CVec], candidates: impl IntoIterator<Item = CVec>, tol: f64) -> Vec<CVec> {
    let mut out: Vec<CVec> = Vec::new();
    for mut v in candidates {
        let scale = vec_norm(&v);
        if scale == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in existing.iter().chain(out.iter()) {
                let p = dot(q, &v);
                v -= q * p;
            }
        }
        let n = vec_norm(&v);
        if n > tol * scale.max(1.0) {
            out.push(v.unscale(n));
        }
    }
    out
}

pub fn random_complex_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVec {
    CVec::from_fn(n, |_, _| c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
}

pub fn random_complex_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    CMat::from_fn(n, n, |_, _| c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = random_complex_matrix(n, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Haar-random special unitary.
pub fn random_special_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let u = random_unitary(n, rng);
    let det = u.determinant();
    let ph = C64::from_polar(1.0, -det.arg() / n as f64);
    u * ph
}

/// Random invertible matrix with unit determinant.
pub fn random_sl<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    loop {
        let g = random_complex_matrix(n, rng);
        let det = g.determinant();
        if det.norm() > 1e-3 {
            let root = det.powf(1.0 / n as f64);
            return g.map(|z| z / root);
        }
    }
}

pub fn matrix_to_nested(a: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| [a[(i, j)].re, a[(i, j)].im]).collect()).collect()
}

pub fn nested_to_matrix(rows: &[Vec<[f64; 2]>]) -> Option<CMat> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return None;
    }
    Some(CMat::from_fn(n, m, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

pub fn vector_to_pairs(v: &CVec) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

/// Serde adapter for complex matrices as nested `[re, im]` arrays.
pub mod serde_cmat {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(a: &CMat, s: S) -> Result<S::Ok, S::Error> {
        matrix_to_nested(a).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        nested_to_matrix(&rows).ok_or_else(|| serde::de::Error::custom("ragged matrix"))
    }
}

/// Serde adapter for lists of complex matrices.
pub mod serde_cmat_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(a: &[CMat], s: S) -> Result<S::Ok, S::Error> {
        a.iter().map(matrix_to_nested).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMat>, D::Error> {
        let all = Vec::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
        all.iter().map(|rows| nested_to_matrix(rows).ok_or_else(|| serde::de::Error::custom("ragged matrix"))).collect()
    }
}

/// Serde adapter for complex vectors as `[re, im]` pairs.
pub mod serde_cvec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &CVec, s: S) -> Result<S::Ok, S::Error> {
        vector_to_pairs(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVec, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(CVec::from_iterator(pairs.len(), pairs.iter().map(|p| c(p[0], p[1]))))
    }
}

/// Serde adapter for lists of complex vectors.
pub mod serde_cvec_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[CVec], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(vector_to_pairs).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CVec>, D::Error> {
        let all = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        Ok(all.iter().map(|p| CVec::from_iterator(p.len(), p.iter().map(|x| c(x[0], x[1])))).collect())
    }
}

/// exp(i·t·h) for Hermitian `h`.
pub fn expm_i_hermitian(h: &CMat, t: f64) -> CMat {
    let (vals, vecs) = eigh(h);
    let d = CMat::from_diagonal(&CVec::from_iterator(vals.len(), vals.iter().map(|&l| C64::from_polar(1.0, t * l))));
    &vecs * d * vecs.adjoint()
}
