use serde::{Deserialize, Serialize};
use slocc::critical::CriticalRecord;
use slocc::flow::{FlowStop, FlowTrace};
use slocc::{FlowConfig, PureState, SectorKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    pub source: String,
    pub sector: SectorKind,
    pub parties: usize,
    pub local_dim: usize,
    pub dimension: usize,
}

impl InputDescriptor {
    pub fn new(source: &str, state: &PureState) -> Self {
        let s = state.sector();
        InputDescriptor {
            source: source.to_string(),
            sector: s.kind,
            parties: s.parties,
            local_dim: s.local_dim,
            dimension: s.dim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSummary {
    pub iterations: usize,
    pub converged: bool,
    pub stop: FlowStop,
    pub initial_mu_norm_sq: f64,
    pub final_mu_norm_sq: f64,
    pub final_grad_norm: f64,
}

impl FlowSummary {
    pub fn from_trace(trace: &FlowTrace) -> Self {
        let first = trace.samples.first().expect("trace has samples");
        let last = trace.final_sample().expect("trace has samples");
        FlowSummary {
            iterations: trace.iterations(),
            converged: trace.converged,
            stop: trace.stop,
            initial_mu_norm_sq: first.mu_norm_sq,
            final_mu_norm_sq: last.mu_norm_sq,
            final_grad_norm: last.grad_norm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub flow: FlowConfig,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub input: InputDescriptor,
    pub record: CriticalRecord,
    pub flow: FlowSummary,
    pub version: String,
    pub config: ConfigEcho,
}

impl Report {
    pub fn csv_header() -> [&'static str; 11] {
        [
            "source",
            "lambda",
            "d",
            "variance",
            "morse_index",
            "stability",
            "orbit_dimension",
            "group_dimension",
            "iterations",
            "stop",
            "final_grad_norm",
        ]
    }

    pub fn csv_row(&self) -> Vec<String> {
        let r = &self.record;
        vec![
            self.input.source.clone(),
            r.lambda.to_string(),
            r.d_value.to_string(),
            r.variance.to_string(),
            r.morse_index.map_or(String::new(), |i| i.to_string()),
            r.stability.to_string(),
            r.orbit_dimension.to_string(),
            r.group_dimension.to_string(),
            self.flow.iterations.to_string(),
            serde_json::to_value(self.flow.stop).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default(),
            self.flow.final_grad_norm.to_string(),
        ]
    }
}
