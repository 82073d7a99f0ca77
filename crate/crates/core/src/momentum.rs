//! Momentum map of the local-unitary action and derived quantities.
//!
//! Conventions: the pairing on `i𝔨` is `(A|B) = Σ_p tr(A_p B_p)` summed over
//! tensor slots, so for identical particles the single shared block counts `L`
//! times. With this pairing
//!
//! * `μ([v]) = (ρ_p − I/N)_p`,
//! * `μ*([v]) = Σ_p I⊗…⊗(ρ_p − I/N)⊗…⊗I`,
//! * `‖μ‖² = Σ_p tr((ρ_p − I/N)²) = ⟨v|μ*([v])v⟩`,
//! * `Var + ‖μ‖² = c`, a constant of the sector.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64, ZERO};
use crate::statespace::{apply_on_slot, PureState, Sector, SectorKind};

/// Trace-orthonormal basis of traceless Hermitian `N×N` matrices
/// (generalized Gell-Mann matrices scaled by `1/√2`).
#[derive(Debug, Clone)]
pub struct GeneratorFrame {
    pub local_dim: usize,
    pub generators: Vec<CMat>,
}

impl GeneratorFrame {
    pub fn su(n: usize) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut gens = Vec::with_capacity(n * n - 1);
        for j in 0..n {
            for k in j + 1..n {
                let mut sym = CMat::zeros(n, n);
                sym[(j, k)] = c(s, 0.0);
                sym[(k, j)] = c(s, 0.0);
                gens.push(sym);
                let mut asym = CMat::zeros(n, n);
                asym[(j, k)] = c(0.0, -s);
                asym[(k, j)] = c(0.0, s);
                gens.push(asym);
            }
        }
        for l in 1..n {
            let norm = (1.0 / (l * (l + 1)) as f64).sqrt();
            let mut d = CMat::zeros(n, n);
            for j in 0..l {
                d[(j, j)] = c(norm, 0.0);
            }
            d[(l, l)] = c(-(l as f64) * norm, 0.0);
            gens.push(d);
        }
        GeneratorFrame { local_dim: n, generators: gens }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// `μ([v])`: one traceless Hermitian block per party (one shared block for
/// identical particles).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumPoint {
    pub sector: Sector,
    #[serde(with = "linalg::serde_cmat_vec")]
    pub matrices: Vec<CMat>,
}

impl MomentumPoint {
    pub fn zero(sector: Sector) -> Self {
        let n = sector.local_dim;
        MomentumPoint { sector, matrices: vec![CMat::zeros(n, n); sector.momentum_blocks()] }
    }

    /// `‖μ‖² = Σ_p tr(A_p²)` over all tensor slots.
    pub fn norm_sq(&self) -> f64 {
        let mult = self.sector.block_multiplicity() as f64;
        mult * self.matrices.iter().map(|a| (a * a).trace().re).sum::<f64>()
    }

    /// Diagonal point with the given spectra.
    pub fn from_spectrum(spec: &SpectrumPoint) -> Self {
        let matrices = spec
            .spectra
            .iter()
            .map(|s| CMat::from_diagonal(&CVec::from_iterator(s.len(), s.iter().map(|&x| c(x, 0.0)))))
            .collect();
        MomentumPoint { sector: spec.sector, matrices }
    }

    /// Blockwise conjugation `U_p A_p U_p†`.
    pub fn conjugate(&self, unitaries: &[CMat]) -> Self {
        let matrices = self.matrices.iter().zip(unitaries).map(|(a, u)| u * a * u.adjoint()).collect();
        MomentumPoint { sector: self.sector, matrices }
    }

    pub fn distance(&self, other: &MomentumPoint) -> f64 {
        let mult = self.sector.block_multiplicity() as f64;
        (mult * self.matrices.iter().zip(&other.matrices).map(|(a, b)| linalg::fro(&(a - b)).powi(2)).sum::<f64>())
            .sqrt()
    }
}

/// Ordered spectra of the momentum blocks (a point of the positive Weyl chamber).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub sector: Sector,
    pub spectra: Vec<Vec<f64>>,
}

impl SpectrumPoint {
    pub fn new(sector: Sector, spectra: Vec<Vec<f64>>) -> Result<Self> {
        if spectra.len() != sector.momentum_blocks() || spectra.iter().any(|s| s.len() != sector.local_dim) {
            return Err(Error::ShapeMismatch(format!(
                "expected {} spectra of length {}",
                sector.momentum_blocks(),
                sector.local_dim
            )));
        }
        Ok(SpectrumPoint { sector, spectra })
    }

    /// Qubit point with block spectra `(λ_p, −λ_p)`.
    pub fn qubit(sector: Sector, lambdas: &[f64]) -> Result<Self> {
        if sector.local_dim != 2 {
            return Err(Error::NotQubitSector);
        }
        SpectrumPoint::new(sector, lambdas.iter().map(|&l| vec![l, -l]).collect())
    }

    pub fn zero(sector: Sector) -> Self {
        SpectrumPoint { sector, spectra: vec![vec![0.0; sector.local_dim]; sector.momentum_blocks()] }
    }

    pub fn norm_sq(&self) -> f64 {
        let mult = self.sector.block_multiplicity() as f64;
        mult * self.spectra.iter().flatten().map(|x| x * x).sum::<f64>()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.spectra.iter().flatten().all(|x| x.abs() <= tol)
    }

    /// Weakly decreasing, traceless, and shifted entries inside `[0, 1]`.
    pub fn check_weyl_chamber(&self, tol: f64) -> Result<()> {
        let n = self.sector.local_dim as f64;
        for (p, s) in self.spectra.iter().enumerate() {
            if s.windows(2).any(|w| w[1] > w[0] + tol) {
                return Err(Error::NotInWeylChamber(format!("block {p} is not weakly decreasing: {s:?}")));
            }
            let sum: f64 = s.iter().sum();
            if sum.abs() > tol {
                return Err(Error::NotInWeylChamber(format!("block {p} has trace {sum:e}")));
            }
            if s.iter().any(|&x| x + 1.0 / n < -tol || x + 1.0 / n > 1.0 + tol) {
                return Err(Error::NotInWeylChamber(format!("block {p} leaves the density range: {s:?}")));
            }
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &SpectrumPoint) -> f64 {
        self.spectra
            .iter()
            .flatten()
            .zip(other.spectra.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn reduced_from_tensor(t: &CVec, n: usize, slots: usize, slot: usize) -> CMat {
    let inner = n.pow((slots - 1 - slot) as u32);
    let outer = t.len() / (inner * n);
    let mut rho = CMat::zeros(n, n);
    for o in 0..outer {
        let base = o * n * inner;
        for r in 0..inner {
            for i in 0..n {
                let a = t[base + i * inner + r];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    rho[(i, j)] += a * t[base + j * inner + r].conj();
                }
            }
        }
    }
    rho
}

fn require_particles(sector: Sector) -> Result<()> {
    if sector.parties == 0 {
        return Err(Error::InvalidSector("sector without particles has no one-body density".into()));
    }
    Ok(())
}

/// One-particle reduced density matrix `ρ_p`, normalized to unit trace.
///
/// The party index is ignored for identical particles.
pub fn reduced_density(state: &PureState, party: usize) -> Result<CMat> {
    let sector = state.sector();
    require_particles(sector)?;
    let slot = if sector.is_identical() {
        0
    } else {
        if party >= sector.parties {
            return Err(Error::PartyOutOfRange { party, parties: sector.parties });
        }
        party
    };
    let t = state.tensor();
    let norm_sq = t.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if norm_sq < crate::statespace::ZERO_NORM.powi(2) {
        return Err(Error::ZeroState(crate::statespace::ZERO_NORM));
    }
    let mut rho = reduced_from_tensor(&t, sector.local_dim, sector.parties, slot).unscale(norm_sq);
    linalg::hermitize(&mut rho);
    Ok(rho)
}

pub fn momentum(state: &PureState) -> Result<MomentumPoint> {
    let sector = state.sector();
    require_particles(sector)?;
    let matrices = (0..sector.momentum_blocks())
        .map(|p| {
            let mut a = reduced_density(state, p)?;
            linalg::remove_trace(&mut a);
            Ok(a)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentumPoint { sector, matrices })
}

/// Applies `Σ_p embed_p(A_p)` to the amplitudes of `state`.
pub fn mu_star_apply(point: &MomentumPoint, state: &PureState) -> Result<CVec> {
    let sector = state.sector();
    if point.sector != sector {
        return Err(Error::ShapeMismatch(format!("point for {} applied to state in {}", point.sector, sector)));
    }
    let n = sector.local_dim;
    if point.matrices.iter().any(|a| a.nrows() != n || a.ncols() != n) {
        return Err(Error::ShapeMismatch("momentum blocks do not match the local dimension".into()));
    }
    let t = state.tensor();
    let mut out = CVec::zeros(t.len());
    for slot in 0..sector.parties {
        let block = if sector.is_identical() { &point.matrices[0] } else { &point.matrices[slot] };
        out += apply_on_slot(&t, n, sector.parties, slot, block);
    }
    if sector.is_identical() {
        Ok(PureState::from_tensor(sector, &out)?.into_amplitudes())
    } else {
        Ok(out)
    }
}

pub fn mu_norm_sq(state: &PureState) -> Result<f64> {
    Ok(momentum(state)?.norm_sq())
}

/// Tensor-space representatives of the orthonormal frame of `i𝔨` acting on
/// the state space. Identical particles use the diagonal generators
/// `L^{-1/2} Σ_slot ξ^{(slot)}`, orthonormal for the slot-summed pairing.
pub(crate) fn frame_actions(state_tensor: &CVec, sector: Sector) -> Vec<CVec> {
    let n = sector.local_dim;
    let l = sector.parties;
    let frame = GeneratorFrame::su(n);
    let mut out = Vec::with_capacity(frame.len() * sector.momentum_blocks());
    if sector.is_identical() {
        let s = 1.0 / (l as f64).sqrt();
        for g in &frame.generators {
            let mut acc = CVec::zeros(state_tensor.len());
            for slot in 0..l {
                acc += apply_on_slot(state_tensor, n, l, slot, g);
            }
            out.push(acc * c(s, 0.0));
        }
    } else {
        for slot in 0..l {
            for g in &frame.generators {
                out.push(apply_on_slot(state_tensor, n, l, slot, g));
            }
        }
    }
    out
}

/// Sum of variances of the orthonormal local observable frame.
pub fn total_variance(state: &PureState) -> Result<f64> {
    require_particles(state.sector())?;
    let v = crate::statespace::normalize(state)?;
    let t = v.tensor();
    Ok(frame_actions(&t, v.sector())
        .iter()
        .map(|x| {
            let mean = linalg::dot(&t, x).re;
            x.iter().map(|z| z.norm_sqr()).sum::<f64>() - mean * mean
        })
        .sum())
}

/// The constant `c` with `Var + ‖μ‖² = c` on the sector (quadratic Casimir of
/// the irreducible representation in the frame normalization).
pub fn casimir_constant(sector: Sector) -> f64 {
    let n = sector.local_dim as f64;
    let l = sector.parties as f64;
    match sector.kind {
        SectorKind::Distinguishable => l * (n * n - 1.0) / n,
        SectorKind::Bosonic => (n - 1.0) * (n + l) / n,
        SectorKind::Fermionic => (n + 1.0) * (n - l) / n,
    }
}

/// `⟨v⊗v|𝒞₂|v⊗v⟩/⟨v|v⟩²` for the diagonal action on `ℋ⊗ℋ`, computed from the
/// explicit vectors `(X v)⊗v + v⊗(X v)` in the doubled space.
pub fn casimir_vee_expectation(state: &PureState) -> Result<f64> {
    require_particles(state.sector())?;
    let v = crate::statespace::normalize(state)?;
    let sector = v.sector();
    let amps = v.amplitudes();
    let d = amps.len();
    let mut total = 0.0;
    for x_tensor in frame_actions(&v.tensor(), sector) {
        let x = PureState::from_tensor(sector, &x_tensor)?.into_amplitudes();
        let mut y = CVec::zeros(d * d);
        for i in 0..d {
            for j in 0..d {
                y[i * d + j] = x[i] * amps[j] + amps[i] * x[j];
            }
        }
        total += y.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    Ok(total)
}

/// Ordered spectra `Ψ([v])` of the momentum blocks, weakly decreasing.
pub fn psi(state: &PureState) -> Result<SpectrumPoint> {
    let mu = momentum(state)?;
    let spectra = mu
        .matrices
        .iter()
        .map(|a| {
            let (mut vals, _) = linalg::eigh(a);
            vals.reverse();
            vals
        })
        .collect();
    Ok(SpectrumPoint { sector: mu.sector, spectra })
}

/// Outcome of the qubit polygonal inequalities `p_i ≤ Σ_{j≠i} p_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonCheck {
    pub holds: bool,
    /// 0-based indices of the violated inequalities.
    pub violated: Vec<usize>,
}

/// Checks `p_i ≤ Σ_{j≠i} p_j` for the minimal local eigenvalues `p`.
pub fn polygonal_inequalities(minimal: &[f64]) -> PolygonCheck {
    const SLACK: f64 = 1e-12;
    let total: f64 = minimal.iter().sum();
    let violated: Vec<usize> =
        minimal.iter().enumerate().filter(|(_, &p)| p > total - p + SLACK).map(|(i, _)| i).collect();
    PolygonCheck { holds: violated.is_empty(), violated }
}

/// Polygonal inequalities for a qubit spectrum point.
pub fn polygonal_check(spectra: &SpectrumPoint) -> Result<PolygonCheck> {
    if spectra.sector.local_dim != 2 {
        return Err(Error::NotQubitSector);
    }
    let mult = spectra.sector.block_multiplicity();
    let minimal: Vec<f64> = spectra.spectra.iter().flat_map(|s| std::iter::repeat_n(0.5 + s[1], mult)).collect();
    Ok(polygonal_inequalities(&minimal))
}

/// `⟨v|μ*([v]) v⟩`.
pub fn rayleigh(state: &PureState) -> Result<f64> {
    let v = crate::statespace::normalize(state)?;
    let mu = momentum(&v)?;
    let w = mu_star_apply(&mu, &v)?;
    Ok(linalg::dot(v.amplitudes(), &w).re)
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn f<T: Send + Sync>() {}
    f::<MomentumPoint>();
    f::<SpectrumPoint>();
    f::<C64>();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_unitary, ONE};
    use crate::statespace::{
        apply_local, boson_pair, dicke, ghz, max_entangled, product_state, w_state, LocalOperator,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell() -> PureState {
        max_entangled(2, 2).unwrap()
    }

    fn assert_diag(a: &CMat, d: &[f64], tol: f64) {
        let expect = CMat::from_diagonal(&CVec::from_iterator(d.len(), d.iter().map(|&x| c(x, 0.0))));
        assert!(linalg::fro(&(a - expect)) < tol, "{a} != diag{d:?}");
    }

    #[test]
    fn frame_is_trace_orthonormal() {
        for n in 2..5 {
            let f = GeneratorFrame::su(n);
            assert_eq!(f.len(), n * n - 1);
            for (i, a) in f.generators.iter().enumerate() {
                assert!(a.trace().norm() < 1e-15);
                assert!(linalg::fro(&(a - a.adjoint())) < 1e-15);
                for (j, b) in f.generators.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(((a * b).trace() - c(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn reduced_density_examples() {
        for p in 0..3 {
            assert_diag(&reduced_density(&ghz(3), p).unwrap(), &[0.5, 0.5], 1e-15);
            assert_diag(&reduced_density(&product_state(2, &[0, 0, 0]).unwrap(), p).unwrap(), &[1.0, 0.0], 1e-15);
            assert_diag(&reduced_density(&w_state(3), p).unwrap(), &[2.0 / 3.0, 1.0 / 3.0], 1e-15);
        }
        assert!(matches!(reduced_density(&ghz(3), 3), Err(Error::PartyOutOfRange { .. })));
    }

    #[test]
    fn reduced_density_matches_brute_force_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v = PureState::random(Sector::distinguishable(3, 3).unwrap(), &mut rng);
        let a = v.amplitudes();
        // Party 1 (middle): ρ_ij = Σ_{x,z} ψ_{x i z} ψ*_{x j z}
        let mut rho = CMat::zeros(3, 3);
        for x in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    for z in 0..3 {
                        rho[(i, j)] += a[x * 9 + i * 3 + z] * a[x * 9 + j * 3 + z].conj();
                    }
                }
            }
        }
        assert!(linalg::fro(&(reduced_density(&v, 1).unwrap() - rho)) < 1e-14);
    }

    #[test]
    fn momentum_examples() {
        assert!(momentum(&ghz(3)).unwrap().matrices.iter().all(|a| linalg::fro(a) < 1e-15));
        let sep = momentum(&product_state(2, &[0, 0, 0]).unwrap()).unwrap();
        assert_eq!(sep.matrices.len(), 3);
        for a in &sep.matrices {
            assert_diag(a, &[0.5, -0.5], 1e-15);
        }
        assert!(momentum(&bell()).unwrap().norm_sq() < 1e-30);
    }

    #[test]
    fn mu_star_examples() {
        let w = w_state(3);
        let zero = MomentumPoint::zero(w.sector());
        assert!(linalg::vec_norm(&mu_star_apply(&zero, &w).unwrap()) == 0.0);
        let out = mu_star_apply(&momentum(&w).unwrap(), &w).unwrap();
        assert!(linalg::vec_norm(&(out - w.amplitudes() * c(1.0 / 6.0, 0.0))) < 1e-15);
        for n in 2..6 {
            for k in 1..=n {
                let v = max_entangled(n, k).unwrap();
                let lambda = 2.0 * (n - k) as f64 / (n * k) as f64;
                let out = mu_star_apply(&momentum(&v).unwrap(), &v).unwrap();
                assert!(linalg::vec_norm(&(out - v.amplitudes() * c(lambda, 0.0))) < 1e-14);
            }
        }
        let other = MomentumPoint::zero(Sector::qubits(2));
        assert!(matches!(mu_star_apply(&other, &w), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn mu_norm_and_variance_examples() {
        assert!(mu_norm_sq(&ghz(3)).unwrap().abs() < 1e-15);
        assert!((mu_norm_sq(&w_state(3)).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let sep = product_state(2, &[0, 0, 0]).unwrap();
        assert!((mu_norm_sq(&sep).unwrap() - 1.5).abs() < 1e-15);
        assert!((total_variance(&sep).unwrap() - 3.0).abs() < 1e-14);
        assert!((total_variance(&ghz(3)).unwrap() - 4.5).abs() < 1e-14);
        assert!((total_variance(&bell()).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn casimir_constants() {
        assert_eq!(casimir_constant(Sector::qubits(3)), 4.5);
        assert!((casimir_constant(Sector::distinguishable(2, 3).unwrap()) - 16.0 / 3.0).abs() < 1e-15);
        // Spin-1 Casimir s(s+1) = 2 for two two-level bosons.
        assert!((casimir_constant(Sector::bosonic(2, 2).unwrap()) - 2.0).abs() < 1e-15);
        assert_eq!(casimir_constant(Sector::fermionic(4, 4).unwrap()), 0.0);
    }

    #[test]
    fn casimir_vee_examples() {
        assert!((casimir_vee_expectation(&ghz(3)).unwrap() - 9.0).abs() < 1e-13);
        assert!((casimir_vee_expectation(&product_state(2, &[0, 0, 0]).unwrap()).unwrap() - 12.0).abs() < 1e-13);
        assert!((casimir_vee_expectation(&bell()).unwrap() - 6.0).abs() < 1e-13);
    }

    #[test]
    fn psi_examples() {
        let w = psi(&w_state(3)).unwrap();
        for s in &w.spectra {
            assert!((s[0] - 1.0 / 6.0).abs() < 1e-14 && (s[1] + 1.0 / 6.0).abs() < 1e-14);
        }
        assert!(psi(&ghz(3)).unwrap().is_zero(1e-15));
        // |0⟩ ⊗ (|00⟩ + |11⟩)/√2
        let s = Sector::qubits(3);
        let v = PureState::from_labels(s, &[(ONE, &[0, 0, 0]), (ONE, &[0, 1, 1])]).unwrap();
        let p = psi(&v).unwrap();
        assert!((p.spectra[0][0] - 0.5).abs() < 1e-15 && (p.spectra[0][1] + 0.5).abs() < 1e-15);
        assert!(p.spectra[1].iter().chain(&p.spectra[2]).all(|x| x.abs() < 1e-15));
        p.check_weyl_chamber(1e-12).unwrap();
    }

    #[test]
    fn polygonal_examples() {
        assert!(polygonal_inequalities(&[0.5, 0.5, 0.5]).holds);
        let bad = polygonal_inequalities(&[0.5, 0.0, 0.0]);
        assert!(!bad.holds);
        assert_eq!(bad.violated, vec![0]);
        assert!(polygonal_inequalities(&[1.0 / 3.0; 3]).holds);
        let w = psi(&w_state(3)).unwrap();
        assert!(polygonal_check(&w).unwrap().holds);
        let qutrit = psi(&max_entangled(3, 2).unwrap()).unwrap();
        assert!(matches!(polygonal_check(&qutrit), Err(Error::NotQubitSector)));
    }

    #[test]
    fn identical_particle_conventions() {
        // Dicke: ρ = diag((L−k)/L, k/L) in {|0⟩,|1⟩}.
        for l in 1..7 {
            for k in 0..=l {
                let rho = reduced_density(&dicke(k, l).unwrap(), 0).unwrap();
                assert_diag(&rho, &[(l - k) as f64 / l as f64, k as f64 / l as f64], 1e-14);
            }
        }
        // 2-boson v_k has the same spectrum as its distinguishable twin.
        let b = boson_pair(4, 2).unwrap();
        let mu = momentum(&b).unwrap();
        assert_eq!(mu.matrices.len(), 1);
        assert!((mu.norm_sq() - mu_norm_sq(&max_entangled(4, 2).unwrap()).unwrap()).abs() < 1e-14);
        assert!((rayleigh(&b).unwrap() - mu.norm_sq()).abs() < 1e-14);
    }

    #[test]
    fn equivariance_and_invariants_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for sector in [
            Sector::qubits(3),
            Sector::distinguishable(2, 3).unwrap(),
            Sector::bosonic(3, 3).unwrap(),
            Sector::fermionic(2, 5).unwrap(),
        ] {
            let c0 = casimir_constant(sector);
            for _ in 0..20 {
                let v = PureState::random(sector, &mut rng);
                let us: Vec<CMat> =
                    (0..sector.momentum_blocks()).map(|_| random_unitary(sector.local_dim, &mut rng)).collect();
                let uv = apply_local(&LocalOperator::per_party(us.clone()), &v).unwrap();
                let lhs = momentum(&uv).unwrap();
                let rhs = momentum(&v).unwrap().conjugate(&us);
                assert!(lhs.distance(&rhs) < 1e-10);
                assert!(psi(&uv).unwrap().max_abs_diff(&psi(&v).unwrap()) < 1e-10);
                let m = mu_norm_sq(&v).unwrap();
                assert!((total_variance(&v).unwrap() + m - c0).abs() < 1e-10);
                assert!((rayleigh(&v).unwrap() - m).abs() < 1e-12);
                assert!((casimir_vee_expectation(&v).unwrap() - 2.0 * c0 - 2.0 * m).abs() < 1e-10);
            }
        }
    }
}
