//! Critical points of `‖μ‖²`: criticality test, eigenspaces of `α*`, the
//! self-consistency `μ([v]) = α`, orbit dimensions and stability.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{self, FlowConfig, ZERO_STRATUM};
use crate::linalg::{self, c, CVec, ONE};
use crate::momentum::{self, MomentumPoint, SpectrumPoint};
use crate::morse;
use crate::statespace::{normalize, PureState, Sector};

/// Relative gap below which diagonal entries of `α*` are grouped.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Self-consistency residual `‖μ(v) − α‖²` accepted as a solution.
pub const SOLVE_TOL: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Semistable,
    Nullcone,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Semistable => "semistable",
            Stability::Nullcone => "nullcone",
        })
    }
}

/// Family invariants read off at the critical orbit reached by the flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalRecord {
    pub lambda: f64,
    #[serde(rename = "d")]
    pub d_value: f64,
    pub variance: f64,
    pub morse_index: Option<usize>,
    pub stability: Stability,
    pub stratum: SpectrumPoint,
    pub orbit_dimension: usize,
    pub group_dimension: usize,
    /// Second-variation values along the orbit complement (empty in the zero stratum).
    pub hessian_spectrum: Vec<f64>,
    /// `‖μ‖²` below this value counts as the zero stratum.
    pub zero_threshold: f64,
    #[serde(rename = "terminal_state")]
    pub state: PureState,
}

/// One eigenspace of the diagonal operator `α*`, spanned by sector basis vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenspaceReport {
    pub alpha: SpectrumPoint,
    pub eigenvalue: f64,
    pub multiplicity: usize,
    /// Sector basis indices of the spanning vectors.
    pub indices: Vec<usize>,
    #[serde(with = "linalg::serde_cvec_vec")]
    pub basis: Vec<CVec>,
}

impl EigenspaceReport {
    /// Basis labels (digits, occupations or 1-based subsets) of the spanning vectors.
    pub fn labels(&self) -> Vec<Vec<usize>> {
        let all = self.alpha.sector.basis_labels();
        self.indices.iter().map(|&i| all[i].clone()).collect()
    }
}

/// `(gradient_norm ≤ tol, λ)`.
pub fn is_critical(state: &PureState, tol: f64) -> Result<(bool, f64)> {
    let (lambda, grad) = flow::lambda_and_gradient(state)?;
    Ok((grad <= tol, lambda))
}

/// Diagonal of `α*` in the sector basis.
pub fn alpha_star_diagonal(alpha: &SpectrumPoint) -> Vec<f64> {
    let sector = alpha.sector;
    sector
        .basis_labels()
        .iter()
        .map(|label| {
            sector
                .slot_levels(label)
                .iter()
                .enumerate()
                .map(|(slot, &lvl)| {
                    let block = if sector.is_identical() { 0 } else { slot };
                    alpha.spectra[block][lvl]
                })
                .sum()
        })
        .collect()
}

/// Eigenspaces of `α*`, ordered by decreasing eigenvalue.
pub fn alpha_star_eigenspaces(alpha: &SpectrumPoint) -> Result<Vec<EigenspaceReport>> {
    SpectrumPoint::new(alpha.sector, alpha.spectra.clone())?;
    alpha.check_weyl_chamber(1e-12)?;
    let diag = alpha_star_diagonal(alpha);
    let d = diag.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| diag[b].total_cmp(&diag[a]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if (diag[g[0]] - diag[i]).abs() <= DEGENERACY_TOL * diag[g[0]].abs().max(1.0) => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    Ok(groups
        .into_iter()
        .map(|mut g| {
            g.sort_unstable();
            let eigenvalue = g.iter().map(|&i| diag[i]).sum::<f64>() / g.len() as f64;
            let basis = g
                .iter()
                .map(|&i| {
                    let mut e = CVec::zeros(d);
                    e[i] = ONE;
                    e
                })
                .collect();
            EigenspaceReport { alpha: alpha.clone(), eigenvalue, multiplicity: g.len(), indices: g, basis }
        })
        .collect())
}

/// `‖μ(v) − α‖²` with the slot-summed pairing.
fn residual(v: &PureState, target: &MomentumPoint) -> Result<(f64, MomentumPoint)> {
    let mu = momentum::momentum(v)?;
    let diff = MomentumPoint {
        sector: mu.sector,
        matrices: mu.matrices.iter().zip(&target.matrices).map(|(a, b)| a - b).collect(),
    };
    Ok((diff.norm_sq(), diff))
}

struct SphereSearch<'a> {
    report: &'a EigenspaceReport,
    target: MomentumPoint,
    sector: Sector,
}

impl SphereSearch<'_> {
    fn embed(&self, coords: &CVec) -> PureState {
        let d = self.sector.dim();
        let mut amps = CVec::zeros(d);
        for (k, &i) in self.report.indices.iter().enumerate() {
            amps[i] = coords[k];
        }
        PureState::new(self.sector, amps).expect("sector sized amplitudes")
    }

    fn value(&self, coords: &CVec) -> Result<(f64, MomentumPoint)> {
        residual(&self.embed(coords), &self.target)
    }

    /// Riemannian gradient of `F(c) = ‖μ(Bc) − α‖²` on the unit sphere of the span.
    fn gradient(&self, coords: &CVec, diff: &MomentumPoint) -> Result<CVec> {
        let v = self.embed(coords);
        let full = momentum::mu_star_apply(diff, &v)? * c(4.0, 0.0);
        let g = CVec::from_iterator(coords.len(), self.report.indices.iter().map(|&i| full[i]));
        let radial = linalg::dot(coords, &g).re;
        Ok(g - coords * c(radial, 0.0))
    }

    fn descend(&self, mut x: CVec, max_iter: usize) -> Result<(CVec, f64)> {
        let (mut f, mut diff) = self.value(&x)?;
        let mut eta: f64 = 0.5;
        let mut stalled = 0;
        for _ in 0..max_iter {
            if f < SOLVE_TOL {
                break;
            }
            let g = self.gradient(&x, &diff)?;
            let gn = linalg::vec_norm(&g).powi(2);
            if gn < 1e-30 {
                break;
            }
            eta = (eta * 2.0).min(8.0);
            let mut moved = false;
            while eta > 1e-12 {
                let trial = &x - &g * c(eta, 0.0);
                let trial = trial.unscale(linalg::vec_norm(&trial));
                let (ft, dt) = self.value(&trial)?;
                if ft <= f - 1e-4 * eta * gn {
                    stalled = if f - ft < 1e-6 * f { stalled + 1 } else { 0 };
                    x = trial;
                    f = ft;
                    diff = dt;
                    moved = true;
                    break;
                }
                eta *= 0.5;
            }
            if !moved || stalled > 200 {
                break;
            }
        }
        Ok((x, f))
    }
}

/// States in the eigenspace with `μ([v]) = α`, found by projected gradient
/// descent from random starts on the unit sphere of the span (seeded).
///
/// One-dimensional eigenspaces are checked directly. The search stops at the
/// first solution; an empty list means none of the restarts converged.
pub fn self_consistent_critical_seeded(
    report: &EigenspaceReport,
    tol: f64,
    restarts: usize,
    seed: u64,
) -> Result<Vec<PureState>> {
    let sector = report.alpha.sector;
    let target = MomentumPoint::from_spectrum(&report.alpha);
    let search = SphereSearch { report, target, sector };
    let m = report.multiplicity;
    let accept = |x: &CVec, f: f64| -> Result<Option<PureState>> {
        if f >= SOLVE_TOL.max(tol * tol) {
            return Ok(None);
        }
        let v = normalize(&search.embed(x))?;
        Ok(is_critical(&v, tol.max(1e-8))?.0.then_some(v))
    };
    if m == 1 {
        let x = CVec::from_element(1, ONE);
        let (f, _) = search.value(&x)?;
        return Ok(accept(&x, f)?.into_iter().collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        let x0 = linalg::random_complex_vector(m, &mut rng);
        let x0 = x0.unscale(linalg::vec_norm(&x0));
        let (x, f) = search.descend(x0, 4000)?;
        if let Some(v) = accept(&x, f)? {
            return Ok(vec![v]);
        }
    }
    Ok(Vec::new())
}

/// [`self_consistent_critical_seeded`] with 32 restarts and a fixed seed.
pub fn self_consistent_critical(report: &EigenspaceReport, tol: f64) -> Result<Vec<PureState>> {
    self_consistent_critical_seeded(report, tol, 32, 0xc0ffee)
}

/// Reduced fractions `p/q ∈ [0, 1/2]` with `q ≤ max_den`, ascending.
pub fn rational_grid(max_den: usize) -> Vec<f64> {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for q in 1..=max_den.max(1) {
        for p in 0..=q / 2 {
            if gcd(p, q) == 1 {
                pairs.push((p, q));
            }
        }
    }
    pairs.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    pairs.dedup_by(|a, b| a.0 * b.1 == b.0 * a.1);
    pairs.iter().map(|&(p, q)| p as f64 / q as f64).collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Candidate qubit spectra `(λ_p, −λ_p)` on the rational grid, restricted by
/// the polygonal inequalities.
pub fn alpha_grid(sector: Sector, max_den: usize) -> Result<Vec<SpectrumPoint>> {
    if sector.local_dim != 2 {
        return Err(Error::NotQubitSector);
    }
    let grid = rational_grid(max_den);
    let blocks = sector.momentum_blocks();
    let mut out = Vec::new();
    let mut idx = vec![0usize; blocks];
    loop {
        let lambdas: Vec<f64> = idx.iter().map(|&i| grid[i]).collect();
        let point = SpectrumPoint::qubit(sector, &lambdas)?;
        if momentum::polygonal_check(&point)?.holds {
            out.push(point);
        }
        let mut k = 0;
        loop {
            if k == blocks {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < grid.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub max_denominator: usize,
    pub tolerance: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { max_denominator: 12, tolerance: 1e-8, restarts: 32, seed: 0xc0ffee }
    }
}

/// A critical family found by the scan: `α`, the eigenvalue `λ = ‖α‖²` and a
/// representative with `μ = α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalFamily {
    pub alpha: SpectrumPoint,
    pub eigenvalue: f64,
    pub multiplicity: usize,
    pub representative: PureState,
}

impl CriticalFamily {
    pub fn d_value(&self) -> f64 {
        self.alpha.norm_sq().sqrt()
    }
}

/// Scans the qubit Weyl-chamber grid: for every candidate `α` the eigenspace of
/// `α*` with eigenvalue `‖α‖²` is searched for a solution of `μ([v]) = α`.
/// Families are returned in order of increasing `d`.
pub fn scan_critical_families(sector: Sector, cfg: &ScanConfig) -> Result<Vec<CriticalFamily>> {
    let grid = alpha_grid(sector, cfg.max_denominator)?;
    let found: Vec<Option<CriticalFamily>> = grid
        .par_iter()
        .enumerate()
        .map(|(k, alpha)| -> Result<Option<CriticalFamily>> {
            let target = alpha.norm_sq();
            let spaces = alpha_star_eigenspaces(alpha)?;
            let Some(report) =
                spaces.into_iter().find(|r| (r.eigenvalue - target).abs() <= DEGENERACY_TOL * target.abs().max(1.0))
            else {
                return Ok(None);
            };
            let seed = cfg.seed.wrapping_add(k as u64);
            let states = self_consistent_critical_seeded(&report, cfg.tolerance, cfg.restarts, seed)?;
            Ok(states.into_iter().next().map(|v| CriticalFamily {
                alpha: alpha.clone(),
                eigenvalue: report.eigenvalue,
                multiplicity: report.multiplicity,
                representative: v,
            }))
        })
        .collect::<Result<_>>()?;
    let mut families: Vec<CriticalFamily> = found.into_iter().flatten().collect();
    families.sort_by(|a, b| a.alpha.norm_sq().total_cmp(&b.alpha.norm_sq()));
    Ok(families)
}

/// Real dimension of the SLOCC orbit through `[v]` in projective space.
pub fn orbit_dimension(state: &PureState) -> Result<usize> {
    Ok(linalg::real_rank(&morse::fundamental_vectors(state)?, 1e-10))
}

/// A terminal in the zero stratum belongs to a closed orbit when its
/// smallest orbit singular value exceeds this multiple of `‖μ‖^{1/2}`.
///
/// Along a non-closed orbit the terminal approaches a point with a larger
/// stabilizer and the singular values of the directions in that stabilizer
/// shrink like `‖μ‖^{1/2}`.
pub const CLOSED_ORBIT_RATIO: f64 = 4.0;

/// Whether the zero-stratum terminal lies on (or next to) a closed orbit of
/// full dimension.
fn terminal_has_closed_full_orbit(terminal: &PureState, mu2: f64) -> Result<bool> {
    let group = terminal.sector().group_real_dim();
    let sv = linalg::real_singular_values(&morse::fundamental_vectors(terminal)?);
    let Some(&smallest) = sv.get(group - 1) else {
        return Ok(false);
    };
    if mu2 <= 0.0 {
        return Ok(smallest > 1e-10 * sv[0]);
    }
    Ok(smallest > CLOSED_ORBIT_RATIO * mu2.sqrt().sqrt())
}

fn stability_from(state: &PureState, terminal: &PureState) -> Result<Stability> {
    let mu2 = momentum::mu_norm_sq(terminal)?;
    if mu2 >= ZERO_STRATUM {
        return Ok(Stability::Nullcone);
    }
    let full = orbit_dimension(state)? == state.sector().group_real_dim();
    if full && terminal_has_closed_full_orbit(terminal, mu2)? {
        Ok(Stability::Stable)
    } else {
        Ok(Stability::Semistable)
    }
}

pub fn stability_class(state: &PureState, config: &FlowConfig) -> Result<Stability> {
    let trace = flow::flow_to_critical(state, config)?;
    stability_from(state, &trace.terminal)
}

/// Flows `state` to its critical orbit and records the family invariants.
pub fn classify(state: &PureState, config: &FlowConfig) -> Result<CriticalRecord> {
    let trace = flow::flow_to_critical(state, config)?;
    record_from_terminal(state, &trace.terminal)
}

/// Builds the record for a flow terminal reached from `state`.
pub fn record_from_terminal(state: &PureState, terminal: &PureState) -> Result<CriticalRecord> {
    let mu2 = momentum::mu_norm_sq(terminal)?;
    let (lambda, _) = flow::lambda_and_gradient(terminal)?;
    let (morse_index, hessian_spectrum) = match morse::hessian_spectrum(terminal, morse::CRITICAL_TOL) {
        Ok(spec) => (Some(2 * spec.iter().filter(|&&x| x < -morse::NULL_BAND).count()), spec),
        Err(Error::NotCritical { .. }) => (None, Vec::new()),
        Err(e) => return Err(e),
    };
    Ok(CriticalRecord {
        lambda,
        d_value: mu2.max(0.0).sqrt(),
        variance: momentum::total_variance(terminal)?,
        morse_index,
        stability: stability_from(state, terminal)?,
        stratum: flow::stratum_of_terminal(terminal)?,
        orbit_dimension: orbit_dimension(state)?,
        group_dimension: state.sector().group_real_dim(),
        hessian_spectrum,
        zero_threshold: ZERO_STRATUM,
        state: terminal.clone(),
    })
}

/// Whether `μ⁻¹(0)` meets the sector, decided by the self-consistency search at `α = 0`.
pub fn zero_level_nonempty(sector: Sector, cfg: &ScanConfig) -> Result<bool> {
    let alpha = SpectrumPoint::zero(sector);
    let spaces = alpha_star_eigenspaces(&alpha)?;
    let report = spaces.into_iter().next().expect("at least one eigenspace");
    Ok(!self_consistent_critical_seeded(&report, cfg.tolerance, cfg.restarts, cfg.seed)?.is_empty())
}
