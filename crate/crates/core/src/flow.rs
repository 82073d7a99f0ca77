//! Gradient flow of `−‖μ‖²` along SLOCC directions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec};
use crate::momentum::{self, MomentumPoint, SpectrumPoint};
use crate::statespace::{apply_local, normalize, LocalOperator, PureState, Sector};

/// Terminal states with `‖μ‖²` below this value are assigned to the stratum
/// of `μ⁻¹(0)`.
pub const ZERO_STRATUM: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub step_size: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub record_every: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig { step_size: 0.05, tolerance: 1e-9, max_iterations: 200_000, record_every: 10 }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidParameters(format!("step size must be positive, got {}", self.step_size)));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidParameters(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 || self.record_every == 0 {
            return Err(Error::InvalidParameters("iteration counts must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub iteration: usize,
    pub mu_norm_sq: f64,
    pub grad_norm: f64,
}

/// Why the flow stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStop {
    /// Gradient norm at or below the tolerance.
    Critical,
    /// `‖μ‖²` fell below [`ZERO_STRATUM`]; the limit lies in `μ⁻¹(0)`.
    ZeroStratum,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub samples: Vec<FlowSample>,
    pub terminal: PureState,
    pub converged: bool,
    pub stop: FlowStop,
}

impl FlowTrace {
    pub fn iterations(&self) -> usize {
        self.samples.last().map_or(0, |s| s.iteration)
    }

    pub fn final_sample(&self) -> Option<&FlowSample> {
        self.samples.last()
    }

    /// One JSON object per line: `{"iteration":…,"mu_norm_sq":…,"grad_norm":…}`.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for s in &self.samples {
            out.push_str(&serde_json::to_string(s).expect("sample serializes"));
            out.push('\n');
        }
        out
    }

    /// Largest single increase of `‖μ‖²` between consecutive samples.
    pub fn max_increase(&self) -> f64 {
        self.samples.windows(2).map(|w| w[1].mu_norm_sq - w[0].mu_norm_sq).fold(0.0, f64::max)
    }
}

struct Snapshot {
    mu: MomentumPoint,
    mu_norm_sq: f64,
    lambda: f64,
    grad_norm: f64,
}

fn snapshot(v: &PureState) -> Result<Snapshot> {
    let mu = momentum::momentum(v)?;
    let w = momentum::mu_star_apply(&mu, v)?;
    let lambda = linalg::dot(v.amplitudes(), &w).re;
    let grad_norm = linalg::vec_norm(&(w - v.amplitudes() * c(lambda, 0.0)));
    let mu_norm_sq = mu.norm_sq();
    Ok(Snapshot { mu, mu_norm_sq, lambda, grad_norm })
}

/// The group elements `exp(−step·(ρ_p − I/N))` used by one flow step.
pub fn flow_operators(mu: &MomentumPoint, step: f64) -> Vec<LocalOperator> {
    LocalOperator::per_party(mu.matrices.iter().map(|a| linalg::expm_hermitian(a, -step)))
}

fn step_with(mu: &MomentumPoint, v: &PureState, step: f64) -> Result<PureState> {
    normalize(&apply_local(&flow_operators(mu, step), v)?)
}

/// `normalize(exp(−step·μ*([v])) v)`.
pub fn flow_step(state: &PureState, step: f64) -> Result<PureState> {
    let v = normalize(state)?;
    let mu = momentum::momentum(&v)?;
    step_with(&mu, &v, step)
}

/// `‖μ*([v])v − λv‖` with `λ = ⟨v|μ*([v])v⟩`.
pub fn gradient_norm(state: &PureState) -> Result<f64> {
    Ok(snapshot(&normalize(state)?)?.grad_norm)
}

/// Critical value `λ` and gradient norm at `state`.
pub fn lambda_and_gradient(state: &PureState) -> Result<(f64, f64)> {
    let s = snapshot(&normalize(state)?)?;
    Ok((s.lambda, s.grad_norm))
}

/// Runs the flow until the gradient norm drops to `config.tolerance` or the
/// trajectory enters the zero stratum.
///
/// Orbits that are not closed approach `μ⁻¹(0)` only polynomially in flow
/// time, so the zero stratum is decided by the `‖μ‖²` threshold instead of
/// the gradient tolerance.
pub fn flow_to_critical(state: &PureState, config: &FlowConfig) -> Result<FlowTrace> {
    config.validate()?;
    let mut v = normalize(state)?;
    let mut samples = Vec::new();
    let mut iteration = 0;
    loop {
        let snap = snapshot(&v)?;
        let sample = FlowSample { iteration, mu_norm_sq: snap.mu_norm_sq, grad_norm: snap.grad_norm };
        let stop = if snap.grad_norm <= config.tolerance {
            Some(FlowStop::Critical)
        } else if snap.mu_norm_sq < ZERO_STRATUM {
            Some(FlowStop::ZeroStratum)
        } else {
            None
        };
        if let Some(stop) = stop {
            samples.push(sample);
            return Ok(FlowTrace { samples, terminal: v, converged: true, stop });
        }
        if iteration >= config.max_iterations {
            samples.push(sample);
            let grad_norm = snap.grad_norm;
            let trace = FlowTrace { samples, terminal: v, converged: false, stop: FlowStop::MaxIterations };
            return Err(Error::NotConverged { iterations: iteration, grad_norm, trace: Box::new(trace) });
        }
        if iteration % config.record_every == 0 {
            samples.push(sample);
        }
        v = step_with(&snap.mu, &v, config.step_size)?;
        iteration += 1;
    }
}

/// `d([v])`: the norm of `μ` at the flow terminal.
pub fn slocc_distance(state: &PureState, config: &FlowConfig) -> Result<f64> {
    let trace = flow_to_critical(state, config)?;
    Ok(momentum::mu_norm_sq(&trace.terminal)?.max(0.0).sqrt())
}

/// `Ψ` of the terminal, or the zero point when the terminal lies in the zero stratum.
pub fn stratum_of_terminal(terminal: &PureState) -> Result<SpectrumPoint> {
    if momentum::mu_norm_sq(terminal)? < ZERO_STRATUM {
        return Ok(SpectrumPoint::zero(terminal.sector()));
    }
    momentum::psi(terminal)
}

pub fn stratum_label(state: &PureState, config: &FlowConfig) -> Result<SpectrumPoint> {
    stratum_of_terminal(&flow_to_critical(state, config)?.terminal)
}

/// Result of a one-parameter subgroup limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneParamLimit {
    pub limit: PureState,
    /// `(t, distance to the limit)` on the sampling grid.
    pub residuals: Vec<(f64, f64)>,
    /// Successive grid states differ by less than `1e-10` at the end of the grid.
    pub converged: bool,
}

fn weights(sector: Sector, exponents: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = sector.local_dim;
    if exponents.len() != sector.momentum_blocks() || exponents.iter().any(|e| e.len() != n) {
        return Err(Error::ShapeMismatch(format!(
            "expected {} exponent vectors of length {n}",
            sector.momentum_blocks()
        )));
    }
    for (p, e) in exponents.iter().enumerate() {
        let tr: f64 = e.iter().sum();
        if tr.abs() > 1e-12 || e.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameters(format!("exponents of party {p} are not traceless: {e:?}")));
        }
    }
    Ok(sector
        .basis_labels()
        .iter()
        .map(|label| {
            sector
                .slot_levels(label)
                .iter()
                .enumerate()
                .map(|(slot, &lvl)| if sector.is_identical() { exponents[0][lvl] } else { exponents[slot][lvl] })
                .sum()
        })
        .collect())
}

/// `normalize(exp(t·Σ_p ξ_p) v)` for diagonal generators, evaluated with the
/// largest surviving weight factored out so large `t` stays finite.
fn torus_image(v: &CVec, w: &[f64], t: f64) -> Option<CVec> {
    let top = v.iter().zip(w).filter(|(a, _)| a.norm() > 0.0).map(|(_, &x)| t * x).fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return None;
    }
    let out = CVec::from_iterator(v.len(), v.iter().zip(w).map(|(a, &x)| a * (t * x - top).exp()));
    let n = linalg::vec_norm(&out);
    (n > 0.0 && n.is_finite()).then(|| out.unscale(n))
}

/// Limit of `exp(tξ)·[v]` as `t → ∞` for a diagonal traceless generator
/// `ξ = (ξ_p)`, sampled on the geometric grid `t_max·64^{-(s−1−i)/(s−1)}`.
///
/// The limit is the normalized component of `v` of maximal `ξ`-weight.
pub fn one_param_limit(state: &PureState, exponents: &[Vec<f64>], t_max: f64, samples: usize) -> Result<OneParamLimit> {
    if t_max.is_nan() || t_max <= 0.0 || samples < 2 {
        return Err(Error::InvalidParameters("need t_max > 0 and at least two samples".into()));
    }
    let v = normalize(state)?;
    let w = weights(v.sector(), exponents)?;
    let amps = v.amplitudes();
    let top = amps.iter().zip(&w).filter(|(a, _)| a.norm() > 0.0).map(|(_, &x)| x).fold(f64::NEG_INFINITY, f64::max);
    let leading = CVec::from_iterator(
        amps.len(),
        amps.iter().zip(&w).map(|(a, &x)| if (x - top).abs() <= 1e-12 { *a } else { c(0.0, 0.0) }),
    );
    let leading_norm = linalg::vec_norm(&leading);
    if leading_norm.is_nan() || leading_norm <= 0.0 {
        return Err(Error::Divergent("image vanishes along the subgroup".into()));
    }
    let limit = v.with_amplitudes(leading.unscale(leading_norm));

    let ratio = 64f64;
    let mut residuals = Vec::with_capacity(samples);
    let mut prev: Option<CVec> = None;
    let mut last_step = f64::INFINITY;
    for i in 0..samples {
        let t = t_max * ratio.powf(-((samples - 1 - i) as f64) / (samples - 1) as f64);
        let img = torus_image(amps, &w, t).ok_or_else(|| Error::Divergent(format!("non-finite image at t = {t}")))?;
        residuals.push((t, linalg::ray_distance(&img, limit.amplitudes())));
        if let Some(p) = &prev {
            last_step = linalg::ray_distance(&img, p);
        }
        prev = Some(img);
    }
    Ok(OneParamLimit { limit, residuals, converged: last_step < 1e-10 })
}

/// Per-party diagonal generator `diag(e_0, …, e_{N−1})` as an explicit matrix.
pub fn diagonal_generator(e: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(e.len(), e.iter().map(|&x| c(x, 0.0))))
}
