//! Canonical forms: Schmidt, unitary congruence (Takagi and the antisymmetric
//! block form), the three-qubit normal form, and four-qubit families around
//! `G_abcd`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64, ONE, ZERO};
use crate::statespace::{apply_local, LocalOperator, PureState, Sector, SectorKind};

/// `Σ a_i |i,i⟩` together with the local unitaries `(A, B)` producing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtForm {
    pub coefficients: Vec<f64>,
    #[serde(with = "linalg::serde_cmat_vec")]
    pub local_unitaries: Vec<CMat>,
}

/// Unitary congruence form `U M Uᵗ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CongruenceForm {
    #[serde(with = "linalg::serde_cmat")]
    pub unitary: CMat,
    pub values: Vec<f64>,
}

/// `z|000⟩ + p|011⟩ + q|101⟩ + r|110⟩ + s|111⟩` with the unitaries reaching it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcinForm {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub z: C64,
    #[serde(with = "linalg::serde_cmat_vec")]
    pub unitaries: Vec<CMat>,
    /// Largest modulus left on `C'₀₀₁, C'₀₁₀, C'₁₀₀`.
    pub residual: f64,
    /// Normal forms are not unique for three parties; this is the first one found.
    pub unique: bool,
}

impl AcinForm {
    pub fn state(&self) -> PureState {
        let s = Sector::qubits(3);
        let mut a = CVec::zeros(8);
        a[0] = self.z;
        a[3] = c(self.p, 0.0);
        a[5] = c(self.q, 0.0);
        a[6] = c(self.r, 0.0);
        a[7] = c(self.s, 0.0);
        PureState::new(s, a).expect("eight amplitudes")
    }
}

/// Coefficient matrix `M_ij` of a two-particle state `Σ M_ij |i⟩⊗|j⟩` in the
/// tensor embedding.
pub fn pair_matrix(state: &PureState) -> Result<CMat> {
    let s = state.sector();
    if s.parties != 2 {
        return Err(Error::SectorMismatch(format!("two-particle state required, got {s}")));
    }
    let n = s.local_dim;
    let t = state.tensor();
    Ok(CMat::from_fn(n, n, |i, j| t[i * n + j]))
}

fn sorted_svd(m: &CMat) -> (Vec<f64>, CMat, CMat) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V†");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    let vals = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = CMat::from_fn(u.nrows(), order.len(), |r, k| u[(r, order[k])]);
    let vt = CMat::from_fn(order.len(), vt.ncols(), |k, col| vt[(order[k], col)]);
    (vals, u, vt)
}

/// Schmidt decomposition of a bipartite distinguishable state.
pub fn schmidt(state: &PureState) -> Result<SchmidtForm> {
    let s = state.sector();
    if s.kind != SectorKind::Distinguishable || s.parties != 2 {
        return Err(Error::SectorMismatch(format!("Schmidt form needs two distinguishable parties, got {s}")));
    }
    let v = state.normalized()?;
    let m = pair_matrix(&v)?;
    let (coefficients, u, vt) = sorted_svd(&m);
    // A M Bᵗ = Σ with A = U†, B = conj(V†).
    let a = u.adjoint();
    let b = vt.map(|z| z.conj());
    Ok(SchmidtForm { coefficients, local_unitaries: vec![a, b] })
}

fn check_symmetric(m: &CMat, sign: f64) -> f64 {
    linalg::fro(&(m - m.transpose() * c(sign, 0.0)))
}

/// `U M Uᵗ = diag(a)` with `a` weakly decreasing, for complex symmetric `M`.
pub fn takagi(m: &CMat) -> Result<CongruenceForm> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::ShapeMismatch("square matrix required".into()));
    }
    let asym = check_symmetric(m, 1.0);
    if asym > 1e-10 {
        return Err(Error::NotSymmetric(asym));
    }
    let scale = linalg::fro(m).max(1.0);
    // M conj(w) = σ w  ⟺  [[A, B], [B, −A]] (x; y) = σ (x; y) for M = A + iB, w = x + iy.
    let h = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, ii) = (i / n, i % n);
        let (bj, jj) = (j / n, j % n);
        let z = (m[(ii, jj)] + m[(jj, ii)]) * 0.5;
        match (bi, bj) {
            (0, 0) => z.re,
            (1, 1) => -z.re,
            _ => z.im,
        }
    });
    let eig = h.symmetric_eigen();
    let mut pos: Vec<usize> = (0..2 * n).filter(|&k| eig.eigenvalues[k] > 1e-10 * scale).collect();
    pos.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    pos.truncate(n);
    let mut values = Vec::with_capacity(n);
    let mut cols = Vec::with_capacity(n);
    for &k in &pos {
        let col = eig.eigenvectors.column(k);
        let w = CVec::from_fn(n, |i, _| c(col[i], col[i + n]));
        let kept = linalg::gram_schmidt(&cols, [w], 1e-6);
        if let Some(w) = kept.into_iter().next() {
            cols.push(w);
            values.push(eig.eigenvalues[k]);
        }
    }
    if cols.len() < n {
        // Remaining columns span conj(ker M).
        let (_, _, vt) = sorted_svd(m);
        let kernel: Vec<CVec> = (0..n).rev().map(|k| vt.row(k).transpose()).collect();
        let extra = linalg::gram_schmidt(&cols, kernel, 1e-8);
        for w in extra.into_iter().take(n - cols.len()) {
            cols.push(w);
            values.push(0.0);
        }
    }
    let w = CMat::from_columns(&cols);
    let unitary = w.adjoint();
    Ok(CongruenceForm { unitary, values })
}

/// `U M Uᵗ = ⊕ [[0, a_i], [−a_i, 0]] ⊕ 0` for complex antisymmetric `M`.
/// `values` holds one `a_i` per block, weakly decreasing.
pub fn antisym_canonical(m: &CMat) -> Result<CongruenceForm> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::ShapeMismatch("square matrix required".into()));
    }
    let sym = check_symmetric(m, -1.0);
    if sym > 1e-10 {
        return Err(Error::NotAntisymmetric(sym));
    }
    let scale = linalg::fro(m).max(1.0);
    let (vals, vecs) = linalg::eigh(&(m * m.adjoint()));
    let mut cols: Vec<CVec> = Vec::with_capacity(n);
    let mut values = Vec::new();
    for k in (0..n).rev() {
        if vals[k].max(0.0).sqrt() <= 1e-10 * scale {
            break;
        }
        let Some(w1) = linalg::gram_schmidt(&cols, [vecs.column(k).into_owned()], 1e-6).into_iter().next() else {
            continue;
        };
        let u = m * w1.map(|z| z.conj());
        let a = linalg::vec_norm(&u);
        if a <= 1e-10 * scale {
            continue;
        }
        cols.push(w1);
        let w2 = u.unscale(-a);
        let w2 = linalg::gram_schmidt(&cols, [w2], 1e-6)
            .into_iter()
            .next()
            .ok_or_else(|| Error::ConvergenceFailure("block partner collapsed".into()))?;
        cols.push(w2);
        values.push(a);
    }
    let rest = linalg::gram_schmidt(&cols, (0..n).map(|k| vecs.column(k).into_owned()), 1e-8);
    cols.extend(rest);
    let basis = (0..n).map(|i| {
        let mut e = CVec::zeros(n);
        e[i] = ONE;
        e
    });
    let rest = linalg::gram_schmidt(&cols, basis, 1e-8);
    cols.extend(rest);
    cols.truncate(n);
    Ok(CongruenceForm { unitary: CMat::from_columns(&cols).adjoint(), values })
}

/// Block-diagonal matrix `⊕ [[0, a_i], [−a_i, 0]]` padded with zeros.
pub fn antisym_blocks(values: &[f64], n: usize) -> CMat {
    let mut out = CMat::zeros(n, n);
    for (k, &a) in values.iter().enumerate() {
        out[(2 * k, 2 * k + 1)] = c(a, 0.0);
        out[(2 * k + 1, 2 * k)] = c(-a, 0.0);
    }
    out
}

const ACIN_TARGETS: [usize; 3] = [1, 2, 4];

fn apply_three(us: &[CMat], v: &CVec) -> CVec {
    let mut out = CVec::zeros(8);
    for a in 0..2 {
        for b in 0..2 {
            for cc in 0..2 {
                let mut acc = ZERO;
                for x in 0..2 {
                    for y in 0..2 {
                        for z in 0..2 {
                            acc += us[0][(a, x)] * us[1][(b, y)] * us[2][(cc, z)] * v[4 * x + 2 * y + z];
                        }
                    }
                }
                out[4 * a + 2 * b + cc] = acc;
            }
        }
    }
    out
}

fn acin_objective(w: &CVec) -> f64 {
    ACIN_TARGETS.iter().map(|&k| w[k].norm_sqr()).sum()
}

/// Riemannian gradient of the objective at `U_p` as Hermitian generators.
fn acin_gradient(w: &CVec) -> Vec<CMat> {
    let mut pw = CVec::zeros(8);
    for &k in &ACIN_TARGETS {
        pw[k] = w[k];
    }
    (0..3)
        .map(|p| {
            let shift = 2 - p;
            let mut x = CMat::zeros(2, 2);
            for idx in 0..8 {
                let a = (idx >> shift) & 1;
                for b in 0..2 {
                    let jdx = (idx & !(1 << shift)) | (b << shift);
                    x[(a, b)] += w[idx] * pw[jdx].conj();
                }
            }
            (&x - x.adjoint()) * linalg::I
        })
        .collect()
}

fn descend(v: &CVec, mut us: Vec<CMat>, target: f64, max_iter: usize) -> (Vec<CMat>, f64) {
    let mut w = apply_three(&us, v);
    let mut f = acin_objective(&w);
    let mut eta: f64 = 1.0;
    for _ in 0..max_iter {
        if f <= target {
            break;
        }
        let g = acin_gradient(&w);
        let gn: f64 = g.iter().map(|m| linalg::fro(m).powi(2)).sum();
        if gn < 1e-300 {
            break;
        }
        let mut accepted = false;
        eta = (eta * 2.0).min(4.0);
        while eta > 1e-12 {
            let trial: Vec<CMat> = us.iter().zip(&g).map(|(u, y)| linalg::expm_i_hermitian(y, -eta) * u).collect();
            let wt = apply_three(&trial, v);
            let ft = acin_objective(&wt);
            if ft <= f - 1e-4 * eta * gn {
                us = trial;
                w = wt;
                f = ft;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (us, f)
}

/// Three-qubit normal form with `C'₀₀₁ = C'₀₁₀ = C'₁₀₀ = 0` and real
/// nonnegative `p, q, r, s`, found by descent on `U(2)³` with random restarts.
pub fn acin_form(state: &PureState) -> Result<AcinForm> {
    acin_form_seeded(state, 0x5eed)
}

pub fn acin_form_seeded(state: &PureState, seed: u64) -> Result<AcinForm> {
    let s = state.sector();
    if s != Sector::qubits(3) {
        return Err(Error::SectorMismatch(format!("three distinguishable qubits required, got {s}")));
    }
    let v = state.normalized()?.into_amplitudes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = 1e-20;
    let mut best: Option<(Vec<CMat>, f64)> = None;
    for attempt in 0..24 {
        let start: Vec<CMat> = if attempt == 0 {
            vec![CMat::identity(2, 2); 3]
        } else {
            (0..3).map(|_| linalg::random_unitary(2, &mut rng)).collect()
        };
        let (us, f) = descend(&v, start, target, 20_000);
        if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
            best = Some((us, f));
        }
        if f <= target {
            break;
        }
    }
    let (mut us, f) = best.expect("at least one attempt");
    if f.sqrt() > 1e-9 {
        return Err(Error::ConvergenceFailure(format!("normal form residual {:e}", f.sqrt())));
    }
    // Diagonal phases making the entries 011, 101, 110, 111 real and nonnegative.
    let w = apply_three(&us, &v);
    let ph = |k: usize| if w[k].norm() > 1e-14 { w[k].arg() } else { 0.0 };
    let a = -ph(7) / 3.0;
    let b = [-ph(3) - 2.0 * a, -ph(5) - 2.0 * a, -ph(6) - 2.0 * a];
    for p in 0..3 {
        let d = CMat::from_diagonal(&CVec::from_vec(vec![C64::from_polar(1.0, b[p]), C64::from_polar(1.0, a)]));
        us[p] = d * &us[p];
    }
    let w = apply_three(&us, &v);
    let residual = ACIN_TARGETS.iter().map(|&k| w[k].norm()).fold(0.0, f64::max);
    Ok(AcinForm {
        p: w[3].re.max(0.0),
        q: w[5].re.max(0.0),
        r: w[6].re.max(0.0),
        s: w[7].re.max(0.0),
        z: w[0],
        unitaries: us,
        residual,
        unique: false,
    })
}

/// The `G_abcd` basis `|0000⟩+|1111⟩, |0011⟩+|1100⟩, |0101⟩+|1010⟩, |0110⟩+|1001⟩`.
pub fn gabcd_basis() -> [CVec; 4] {
    let pair = |x: usize| {
        let mut v = CVec::zeros(16);
        v[x] = ONE;
        v[15 - x] = ONE;
        v
    };
    [pair(0b0000), pair(0b0011), pair(0b0101), pair(0b0110)]
}

pub fn gabcd(alpha: [C64; 4]) -> Result<PureState> {
    let basis = gabcd_basis();
    let v = basis.iter().zip(alpha).fold(CVec::zeros(16), |acc, (b, a)| acc + b * a);
    PureState::new(Sector::qubits(4), v)?.normalized()
}

/// Distance from `[v]` to the projective span of `G_abcd`.
pub fn gabcd_span_distance(state: &PureState) -> Result<f64> {
    if state.sector() != Sector::qubits(4) {
        return Err(Error::SectorMismatch(format!("four qubits required, got {}", state.sector())));
    }
    let v = state.normalized()?.into_amplitudes();
    let basis = gabcd_basis();
    let proj = basis.iter().fold(CVec::zeros(16), |acc, b| acc + b * (linalg::dot(b, &v) * 0.5));
    Ok(linalg::vec_norm(&(v - proj)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FourQubitFamily {
    #[serde(rename = "L_abc2")]
    Labc2,
    #[serde(rename = "L_a2b2")]
    La2b2,
    #[serde(rename = "L_ab3")]
    Lab3,
    #[serde(rename = "L_a4")]
    La4,
    #[serde(rename = "L_a2_0")]
    La20,
}

impl FourQubitFamily {
    pub const ALL: [FourQubitFamily; 5] = [
        FourQubitFamily::Labc2,
        FourQubitFamily::La2b2,
        FourQubitFamily::Lab3,
        FourQubitFamily::La4,
        FourQubitFamily::La20,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FourQubitFamily::Labc2 => "L_abc2",
            FourQubitFamily::La2b2 => "L_a2b2",
            FourQubitFamily::Lab3 => "L_ab3",
            FourQubitFamily::La4 => "L_a4",
            FourQubitFamily::La20 => "L_a2_0",
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            FourQubitFamily::Labc2 => 3,
            FourQubitFamily::La2b2 | FourQubitFamily::Lab3 => 2,
            FourQubitFamily::La4 | FourQubitFamily::La20 => 1,
        }
    }

    /// Parameters used by the demos and tests: every parameter set to 1.
    pub fn default_params(self) -> Vec<f64> {
        vec![1.0; self.param_count()]
    }

    /// Split `|v⟩ + |w⟩` with `|v⟩` in the `G_abcd` span (both unnormalized).
    pub fn parts(self, params: &[f64]) -> Result<(CVec, CVec)> {
        if params.len() != self.param_count() || params.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "{} takes {} finite parameters, got {params:?}",
                self.name(),
                self.param_count()
            )));
        }
        let [v1, v2, v3, v4] = gabcd_basis();
        let r = |x: f64| c(x, 0.0);
        let ket = |terms: &[(usize, C64)]| {
            let mut out = CVec::zeros(16);
            for &(k, a) in terms {
                out[k] += a;
            }
            out
        };
        let i = linalg::I;
        Ok(match self {
            FourQubitFamily::Labc2 => {
                let (a, b, cc) = (params[0], params[1], params[2]);
                let v = &v1 * r((a + b) / 2.0) + &v2 * r((a - b) / 2.0) + &v3 * r(cc);
                (v, ket(&[(0b0110, ONE)]))
            }
            FourQubitFamily::La2b2 => {
                let (a, b) = (params[0], params[1]);
                (&v1 * r(a) + &v3 * r(b), v2)
            }
            FourQubitFamily::Lab3 => {
                let (a, b) = (params[0], params[1]);
                let v = &v1 * r(a) + &v3 * r((a + b) / 2.0) + &v4 * r((a - b) / 2.0);
                let s = i * std::f64::consts::FRAC_1_SQRT_2;
                (v, ket(&[(0b0001, s), (0b0010, s), (0b0111, s), (0b1011, s)]))
            }
            FourQubitFamily::La4 => {
                let a = params[0];
                let v = ket(&[(0b0000, r(a)), (0b0101, r(a)), (0b1010, r(a)), (0b1111, r(a))]);
                (v, ket(&[(0b0001, i), (0b0110, ONE), (0b1011, -i)]))
            }
            FourQubitFamily::La20 => {
                let a = params[0];
                (&v1 * r(a), ket(&[(0b0011, ONE), (0b0101, ONE), (0b0110, ONE)]))
            }
        })
    }

    /// Diagonal generators `ξ_p = diag(e_p, −e_p)` of a one-parameter subgroup
    /// fixing `|v⟩` pointwise and contracting `|w⟩` as `t → +∞`.
    pub fn limit_exponents(self) -> Vec<Vec<f64>> {
        let e: [f64; 4] = match self {
            FourQubitFamily::Labc2 => [-1.0, 1.0, 1.0, -1.0],
            FourQubitFamily::La2b2 => [0.0, -1.0, 0.0, 1.0],
            FourQubitFamily::Lab3 => [-1.0, -1.0, 1.0, 1.0],
            FourQubitFamily::La4 => [-2.0, -1.0, 2.0, 1.0],
            FourQubitFamily::La20 => [-3.0, 1.0, 1.0, 1.0],
        };
        e.iter().map(|&x| vec![x, -x]).collect()
    }
}

impl fmt::Display for FourQubitFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FourQubitFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FourQubitFamily::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Normalized `|v⟩ + |w⟩` for the named family.
pub fn four_qubit_family(family: FourQubitFamily, params: &[f64]) -> Result<PureState> {
    let (v, w) = family.parts(params)?;
    PureState::new(Sector::qubits(4), v + w)?.normalized()
}

/// Applies the normal-form unitaries to `state`.
pub fn apply_unitaries(unitaries: &[CMat], state: &PureState) -> Result<PureState> {
    apply_local(&LocalOperator::per_party(unitaries.iter().cloned()), state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::momentum;
    use crate::statespace::{boson_pair, fermion_pair, ghz, max_entangled, product_state};
    use rand::Rng;

    fn sym_random(n: usize, rng: &mut ChaCha8Rng) -> CMat {
        let g = linalg::random_complex_matrix(n, rng);
        (&g + g.transpose()) * c(0.5, 0.0)
    }

    fn antisym_random(n: usize, rng: &mut ChaCha8Rng) -> CMat {
        let g = linalg::random_complex_matrix(n, rng);
        (&g - g.transpose()) * c(0.5, 0.0)
    }

    fn diag(values: &[f64]) -> CMat {
        CMat::from_diagonal(&CVec::from_iterator(values.len(), values.iter().map(|&x| c(x, 0.0))))
    }

    fn assert_unitary(u: &CMat) {
        assert!(linalg::fro(&(u * u.adjoint() - CMat::identity(u.nrows(), u.nrows()))) < 1e-10);
    }

    #[test]
    fn schmidt_examples() {
        let bell = schmidt(&max_entangled(2, 2).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((bell.coefficients[0] - h).abs() < 1e-12 && (bell.coefficients[1] - h).abs() < 1e-12);
        let prod = schmidt(&product_state(2, &[0, 0]).unwrap()).unwrap();
        assert!((prod.coefficients[0] - 1.0).abs() < 1e-15 && prod.coefficients[1].abs() < 1e-15);
        let s = Sector::qubits(2);
        let v = PureState::from_labels(s, &[(c(2.0, 0.0), &[0, 0]), (ONE, &[1, 1])]).unwrap();
        let f = schmidt(&v).unwrap();
        assert!((f.coefficients[0] - 2.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!((f.coefficients[1] - 1.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!(matches!(schmidt(&ghz(3)), Err(Error::SectorMismatch(_))));
    }

    #[test]
    fn schmidt_unitaries_reproduce_diagonal_and_are_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 2..5 {
            let s = Sector::distinguishable(2, n).unwrap();
            let v = PureState::random(s, &mut rng);
            let f = schmidt(&v).unwrap();
            f.local_unitaries.iter().for_each(assert_unitary);
            let out = apply_unitaries(&f.local_unitaries, &v.normalized().unwrap()).unwrap();
            let m = pair_matrix(&out).unwrap();
            assert!(linalg::fro(&(m - diag(&f.coefficients))) < 1e-10);
            assert!(f.coefficients.windows(2).all(|w| w[0] >= w[1]));
            let us: Vec<CMat> = (0..2).map(|_| linalg::random_unitary(n, &mut rng)).collect();
            let g = schmidt(&apply_unitaries(&us, &v).unwrap()).unwrap();
            for (a, b) in f.coefficients.iter().zip(&g.coefficients) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn takagi_examples() {
        let f = takagi(&diag(&[3.0, 1.0])).unwrap();
        assert!((f.values[0] - 3.0).abs() < 1e-12 && (f.values[1] - 1.0).abs() < 1e-12);
        let x = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let f = takagi(&x).unwrap();
        assert!(f.values.iter().all(|a| (a - 1.0).abs() < 1e-12));
        assert!(linalg::fro(&(&f.unitary * &x * f.unitary.transpose() - diag(&f.values))) < 1e-9);
        let bad = CMat::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(takagi(&bad), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn takagi_random_symmetric_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..200 {
            let n = 1 + trial % 6;
            let mut m = sym_random(n, &mut rng);
            if trial % 5 == 0 && n > 1 {
                // Rank-deficient case.
                let v = linalg::random_complex_vector(n, &mut rng);
                m = &v * v.transpose();
            }
            let f = takagi(&m).unwrap();
            assert_unitary(&f.unitary);
            assert!(linalg::fro(&(&f.unitary * &m * f.unitary.transpose() - diag(&f.values))) < 1e-9, "n={n}");
            assert!(f.values.windows(2).all(|w| w[0] >= w[1] - 1e-12));
        }
    }

    #[test]
    fn takagi_of_boson_pair_is_bosonic_schmidt_form() {
        let v = boson_pair(4, 3).unwrap();
        let f = takagi(&pair_matrix(&v).unwrap()).unwrap();
        let a = 1.0 / 3f64.sqrt();
        for (k, x) in f.values.iter().enumerate() {
            let expect = if k < 3 { a } else { 0.0 };
            assert!((x - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn antisym_examples() {
        let m = CMat::from_row_slice(2, 2, &[ZERO, ONE, -ONE, ZERO]);
        let f = antisym_canonical(&m).unwrap();
        assert_eq!(f.values.len(), 1);
        assert!((f.values[0] - 1.0).abs() < 1e-12);
        assert!(linalg::fro(&(&f.unitary * &m * f.unitary.transpose() - antisym_blocks(&f.values, 2))) < 1e-9);
        assert!(matches!(antisym_canonical(&diag(&[1.0, 1.0])), Err(Error::NotAntisymmetric(_))));
    }

    #[test]
    fn antisym_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for trial in 0..200 {
            let n = 1 + trial % 7;
            let m = antisym_random(n, &mut rng);
            let f = antisym_canonical(&m).unwrap();
            assert_unitary(&f.unitary);
            let out = &f.unitary * &m * f.unitary.transpose();
            assert!(linalg::fro(&(out - antisym_blocks(&f.values, n))) < 1e-9, "n={n}");
            let (sv, _, _) = sorted_svd(&m);
            for (k, a) in f.values.iter().enumerate() {
                assert!((a - sv[2 * k]).abs() < 1e-9 && (a - sv[2 * k + 1]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn antisym_of_fermion_pair_is_slater_form() {
        let v = fermion_pair(5, 2).unwrap();
        let f = antisym_canonical(&pair_matrix(&v).unwrap()).unwrap();
        assert_eq!(f.values.len(), 2);
        assert!((f.values[0] - f.values[1]).abs() < 1e-12);
    }

    #[test]
    fn acin_examples() {
        let g = acin_form(&ghz(3)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(g.p < 1e-9 && g.q < 1e-9 && g.r < 1e-9);
        assert!((g.s - h).abs() < 1e-9 && (g.z.norm() - h).abs() < 1e-9);
        let s = Sector::qubits(3);
        let v1 =
            PureState::from_labels(s, &[(ONE, &[0, 1, 1]), (ONE, &[1, 0, 1]), (ONE, &[1, 1, 0]), (ONE, &[0, 0, 0])])
                .unwrap();
        let f = acin_form(&v1).unwrap();
        assert!(f.s < 1e-9);
        for x in [f.p, f.q, f.r, f.z.norm()] {
            assert!((x - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn acin_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let v = PureState::random(Sector::qubits(3), &mut rng).normalized().unwrap();
            let f = acin_form_seeded(&v, rng.random()).unwrap();
            assert!(f.residual < 1e-9);
            f.unitaries.iter().for_each(assert_unitary);
            let out = apply_unitaries(&f.unitaries, &v).unwrap();
            assert!(linalg::vec_norm(&(out.amplitudes() - f.state().amplitudes())) < 1e-9);
            assert!(f.p >= 0.0 && f.q >= 0.0 && f.r >= 0.0 && f.s >= 0.0);
        }
    }

    #[test]
    fn gabcd_examples() {
        let g = gabcd([ONE, ZERO, ZERO, ZERO]).unwrap();
        assert!(g.ray_distance(&ghz(4)) < 1e-15);
        assert!(momentum::mu_norm_sq(&g).unwrap() < 1e-20);
        let half = c(0.5, 0.0);
        let a = gabcd([half; 4]).unwrap();
        let b = gabcd([ONE; 4]).unwrap();
        assert!(linalg::vec_norm(&(a.amplitudes() - b.amplitudes())) < 1e-15);
        assert!((b.norm() - 1.0).abs() < 1e-15);
        assert!(momentum::mu_norm_sq(&a).unwrap() < 1e-20);
        assert!(matches!(gabcd([ZERO; 4]), Err(Error::ZeroState(_))));
        assert!(gabcd_span_distance(&a).unwrap() < 1e-15);
    }

    #[test]
    fn family_examples() {
        let f = FourQubitFamily::Labc2;
        let (v, w) = f.parts(&[1.0, 1.0, 1.0]).unwrap();
        let mut expect = CVec::zeros(16);
        for k in [0b0000, 0b1111, 0b0101, 0b1010] {
            expect[k] = ONE;
        }
        assert!(linalg::vec_norm(&(v - expect)) < 1e-15);
        assert_eq!(w[0b0110], ONE);
        let s = four_qubit_family("L_a2b2".parse().unwrap(), &[1.0, 1.0]).unwrap();
        for k in [0b0000, 0b1111, 0b0101, 0b1010, 0b0011, 0b1100] {
            assert!((s.amplitudes()[k].re - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        }
        let s = four_qubit_family(FourQubitFamily::La20, &[1.0]).unwrap();
        let nz: Vec<usize> = (0..16).filter(|&k| s.amplitudes()[k].norm() > 0.0).collect();
        assert_eq!(nz, vec![0b0000, 0b0011, 0b0101, 0b0110, 0b1111]);
        assert!(matches!("L_x".parse::<FourQubitFamily>(), Err(Error::UnknownFamily(_))));
        assert!(matches!(f.parts(&[1.0]), Err(Error::InvalidParameters(_))));
    }

    #[test]
    fn family_subgroups_fix_v_and_contract_w() {
        let sector = Sector::qubits(4);
        for f in FourQubitFamily::ALL {
            let (v, w) = f.parts(&f.default_params()).unwrap();
            let ex = f.limit_exponents();
            let t = 1.0;
            let ops: Vec<CMat> =
                ex.iter().map(|e| diag(&e.iter().map(|x| (t * x).exp()).collect::<Vec<_>>())).collect();
            let pv = apply_unitaries(&ops, &PureState::new(sector, v.clone()).unwrap()).unwrap();
            assert!(linalg::vec_norm(&(pv.amplitudes() - &v)) < 1e-12, "{f}");
            assert!(gabcd_span_distance(&PureState::new(sector, v).unwrap()).unwrap() < 1e-15);
            let pw = apply_unitaries(&ops, &PureState::new(sector, w.clone()).unwrap()).unwrap();
            if f == FourQubitFamily::La2b2 {
                // |w⟩ = |0011⟩ + |1100⟩ carries weights +2 and −2.
                assert!(gabcd_span_distance(&PureState::new(sector, w.clone()).unwrap()).unwrap() < 1e-15);
                assert!(pw.norm() > w.norm());
            } else {
                assert!(pw.norm() < w.norm() * 0.2, "{f}");
            }
        }
    }

    #[test]
    fn forms_serialize() {
        let f = schmidt(&max_entangled(3, 2).unwrap()).unwrap();
        let back: SchmidtForm = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        let a = acin_form(&ghz(3)).unwrap();
        let back: AcinForm = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
        assert_eq!(serde_json::to_string(&FourQubitFamily::La20).unwrap(), "\"L_a2_0\"");
    }
}
