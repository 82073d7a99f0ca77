//! Morse index of `‖μ‖²` at critical points.
//!
//! The tangent space at `[v]` splits into the SLOCC-orbit directions and their
//! complement. At a critical point the second variation along a unit
//! complement vector `u` is `2(⟨u|μ*u⟩ − λ)`, so the index is twice the number
//! of eigenvalues of `μ*` compressed to the complement that lie below `λ`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::ZERO_STRATUM;
use crate::linalg::{self, c, CMat, CVec, I};
use crate::momentum::{self, MomentumPoint};
use crate::statespace::{normalize, PureState};

/// Eigenvalues of the compressed operator within this band of `λ` are null directions.
pub const NULL_BAND: f64 = 1e-6;

/// Default criticality tolerance for [`morse_index`].
pub const CRITICAL_TOL: f64 = 1e-6;

/// Orthonormal frames of the orbit tangent space and its complement at `[v]`.
///
/// Both spaces are complex subspaces orthogonal to `v`; each complex basis
/// vector `q` contributes the real pair `{q, iq}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentFrame {
    pub base: PureState,
    #[serde(with = "linalg::serde_cvec_vec")]
    pub orbit_basis: Vec<CVec>,
    #[serde(with = "linalg::serde_cvec_vec")]
    pub complement_basis: Vec<CVec>,
}

impl TangentFrame {
    /// Real orthonormal vectors `{q, iq}` spanning the orbit tangent space.
    pub fn orbit_real(&self) -> Vec<CVec> {
        realify(&self.orbit_basis)
    }

    /// Real orthonormal vectors `{q, iq}` spanning the complement.
    pub fn complement_real(&self) -> Vec<CVec> {
        realify(&self.complement_basis)
    }

    pub fn orbit_real_dim(&self) -> usize {
        2 * self.orbit_basis.len()
    }

    pub fn complement_real_dim(&self) -> usize {
        2 * self.complement_basis.len()
    }
}

fn realify(basis: &[CVec]) -> Vec<CVec> {
    basis.iter().flat_map(|q| [q.clone(), q * I]).collect()
}

/// Projected fundamental vectors `Xv − ⟨v|Xv⟩v` for `X` running over the real
/// basis `{ξ_a, iξ_a}` of the complexified local algebra (sector basis coordinates).
pub fn fundamental_vectors(state: &PureState) -> Result<Vec<CVec>> {
    let v = normalize(state)?;
    let sector = v.sector();
    let amps = v.amplitudes();
    let mut out = Vec::new();
    for x in momentum::frame_actions(&v.tensor(), sector) {
        let x = if sector.is_identical() { PureState::from_tensor(sector, &x)?.into_amplitudes() } else { x };
        let mean = linalg::dot(amps, &x);
        let p = x - amps * mean;
        out.push(&p * I);
        out.push(p);
    }
    Ok(out)
}

fn range_basis(vectors: &[CVec], dim: usize, rel_tol: f64) -> Vec<CVec> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = CMat::from_fn(dim, vectors.len(), |r, k| vectors[k][r]);
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > rel_tol * max)
        .map(|k| u.column(k).into_owned())
        .collect()
}

pub fn orbit_tangent_frame(state: &PureState) -> Result<TangentFrame> {
    let v = normalize(state)?;
    let d = v.amplitudes().len();
    let orbit_basis = range_basis(&fundamental_vectors(&v)?, d, 1e-10);
    let mut proj = CMat::identity(d, d) - v.amplitudes() * v.amplitudes().adjoint();
    for q in &orbit_basis {
        proj -= q * q.adjoint();
    }
    let (vals, vecs) = linalg::eigh(&proj);
    let complement_basis = (0..d).rev().filter(|&k| vals[k] > 0.5).map(|k| vecs.column(k).into_owned()).collect();
    Ok(TangentFrame { base: v, orbit_basis, complement_basis })
}

fn require_critical(v: &PureState, tol: f64) -> Result<(MomentumPoint, f64)> {
    let mu = momentum::momentum(v)?;
    let w = momentum::mu_star_apply(&mu, v)?;
    let lambda = linalg::dot(v.amplitudes(), &w).re;
    let grad_norm = linalg::vec_norm(&(w - v.amplitudes() * c(lambda, 0.0)));
    if grad_norm > tol {
        return Err(Error::NotCritical { grad_norm, tol });
    }
    Ok((mu, lambda))
}

/// `⟨c_j|μ*([v]) c_k⟩ − λδ_jk` on the complex complement basis.
fn compressed_shifted(v: &PureState, mu: &MomentumPoint, lambda: f64, basis: &[CVec]) -> Result<CMat> {
    let images =
        basis.iter().map(|b| momentum::mu_star_apply(mu, &v.with_amplitudes(b.clone()))).collect::<Result<Vec<_>>>()?;
    let s = basis.len();
    let mut h = CMat::from_fn(s, s, |j, k| linalg::dot(&basis[j], &images[k]));
    for j in 0..s {
        h[(j, j)] -= c(lambda, 0.0);
    }
    linalg::hermitize(&mut h);
    Ok(h)
}

/// Second-variation values `⟨u|μ*u⟩ − λ` along the complement, ascending;
/// empty in the zero stratum.
pub fn hessian_spectrum(state: &PureState, tol: f64) -> Result<Vec<f64>> {
    let v = normalize(state)?;
    if momentum::mu_norm_sq(&v)? <= ZERO_STRATUM {
        return Ok(Vec::new());
    }
    let (mu, lambda) = require_critical(&v, tol)?;
    let frame = orbit_tangent_frame(&v)?;
    let h = compressed_shifted(&v, &mu, lambda, &frame.complement_basis)?;
    Ok(linalg::eigh(&h).0)
}

/// Number of independent real directions transverse to the orbit along which
/// `‖μ‖²` decreases.
pub fn morse_index(state: &PureState, tol: f64) -> Result<usize> {
    Ok(2 * hessian_spectrum(state, tol)?.iter().filter(|&&x| x < -NULL_BAND).count())
}

/// Central-difference Hessian of `f(w) = ⟨w|μ*([v₀])w⟩/⟨w|w⟩` at `v₀` along
/// the real complement directions of `frame`.
pub fn hessian_fd_oracle(state: &PureState, frame: &TangentFrame, h: f64) -> Result<DMatrix<f64>> {
    let v = normalize(state)?;
    let (mu, _) = require_critical(&v, CRITICAL_TOL)?;
    let dirs = frame.complement_real();
    let amps = v.amplitudes().clone();
    let f = |w: CVec| -> Result<f64> {
        let img = momentum::mu_star_apply(&mu, &v.with_amplitudes(w.clone()))?;
        Ok(linalg::dot(&w, &img).re / linalg::dot(&w, &w).re)
    };
    let n = dirs.len();
    let mut out = DMatrix::<f64>::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let (ua, ub) = (&dirs[a] * c(h, 0.0), &dirs[b] * c(h, 0.0));
            let pp = f(&amps + &ua + &ub)?;
            let pm = f(&amps + &ua - &ub)?;
            let mp = f(&amps - &ua + &ub)?;
            let mm = f(&amps - &ua - &ub)?;
            let val = (pp - pm - mp + mm) / (4.0 * h * h);
            out[(a, b)] = val;
            out[(b, a)] = val;
        }
    }
    Ok(out)
}

/// Index from the finite-difference Hessian: eigenvalues below `−NULL_BAND`.
pub fn fd_morse_index(state: &PureState, h: f64) -> Result<usize> {
    let v = normalize(state)?;
    if momentum::mu_norm_sq(&v)? <= ZERO_STRATUM {
        return Ok(0);
    }
    let frame = orbit_tangent_frame(&v)?;
    let hess = hessian_fd_oracle(&v, &frame, h)?;
    Ok(linalg::eigvalsh_real(&hess).iter().filter(|&&x| x < -NULL_BAND).count())
}
