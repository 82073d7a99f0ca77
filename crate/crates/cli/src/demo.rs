//! Worked examples with computed-vs-expected tables.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use slocc::canonical::{four_qubit_family, gabcd_span_distance, FourQubitFamily};
use slocc::critical::{scan_critical_families, zero_level_nonempty, ScanConfig};
use slocc::flow::{one_param_limit, slocc_distance};
use slocc::momentum::reduced_density;
use slocc::morse::{morse_index, CRITICAL_TOL};
use slocc::statespace::{boson_pair, dicke, fermion_pair, max_entangled};
use slocc::{FlowConfig, Result, Sector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Demo {
    Bipartite { n: usize },
    ThreeQubit,
    FourQubitFamilies,
    Bosons { n: usize, l: usize },
    Fermions { n: usize },
    Dicke { l: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownDemo(pub String);

impl std::fmt::Display for UnknownDemo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "unknown demo: {}", self.0)
    }
}

impl std::error::Error for UnknownDemo {}

fn size_arg(args: &[String], i: usize, default: Option<usize>, min: usize) -> std::result::Result<usize, UnknownDemo> {
    let v = match args.get(i) {
        Some(s) => s.parse().map_err(|_| UnknownDemo(format!("expected an integer, got {s:?}")))?,
        None => default.ok_or_else(|| UnknownDemo("missing size argument".into()))?,
    };
    if v < min {
        return Err(UnknownDemo(format!("size {v} below {min}")));
    }
    Ok(v)
}

impl Demo {
    pub fn parse(name: &str, args: &[String]) -> std::result::Result<Demo, UnknownDemo> {
        let max_args = match name {
            "three-qubit" | "four-qubit-families" => 0,
            "bosons" => 2,
            _ => 1,
        };
        if args.len() > max_args {
            return Err(UnknownDemo(format!("{name}: too many arguments")));
        }
        Ok(match name {
            "bipartite" => Demo::Bipartite { n: size_arg(args, 0, None, 2)? },
            "three-qubit" => Demo::ThreeQubit,
            "four-qubit-families" => Demo::FourQubitFamilies,
            "bosons" => Demo::Bosons { n: size_arg(args, 0, None, 2)?, l: size_arg(args, 1, Some(2), 2)? },
            "fermions" => Demo::Fermions { n: size_arg(args, 0, None, 2)? },
            "dicke" => Demo::Dicke { l: size_arg(args, 0, None, 2)? },
            other => return Err(UnknownDemo(other.to_string())),
        })
    }
}

impl FromStr for Demo {
    type Err = UnknownDemo;

    fn from_str(s: &str) -> std::result::Result<Demo, UnknownDemo> {
        let mut parts = s.split_whitespace();
        let name = parts.next().unwrap_or_default();
        let args: Vec<String> = parts.map(str::to_owned).collect();
        Demo::parse(name, &args)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub case: String,
    pub quantity: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Row {
    fn new(case: impl Into<String>, quantity: &str, computed: f64, expected: f64, tolerance: f64) -> Row {
        Row {
            case: case.into(),
            quantity: quantity.to_string(),
            computed,
            expected,
            tolerance,
            pass: (computed - expected).abs() <= tolerance,
        }
    }

    fn exact(case: impl Into<String>, quantity: &str, computed: usize, expected: usize) -> Row {
        Row::new(case, quantity, computed as f64, expected as f64, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoTable {
    pub demo: String,
    pub rows: Vec<Row>,
}

impl DemoTable {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_text(&self) -> String {
        let w = self.rows.iter().map(|r| r.case.len()).max().unwrap_or(4).max(4);
        let q = self.rows.iter().map(|r| r.quantity.len()).max().unwrap_or(8).max(8);
        let mut out = format!("{}\n", self.demo);
        let _ = writeln!(out, "{:<w$}  {:<q$}  {:>14}  {:>14}  status", "case", "quantity", "computed", "expected");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<w$}  {:<q$}  {:>14.9}  {:>14.9}  {}",
                r.case,
                r.quantity,
                r.computed,
                r.expected,
                if r.pass { "ok" } else { "MISMATCH" }
            );
        }
        let failed = self.rows.iter().filter(|r| !r.pass).count();
        let _ = writeln!(out, "{} rows, {failed} mismatched", self.rows.len());
        out
    }

    pub fn to_csv(&self) -> String {
        let mut wr = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            wr.serialize(r).expect("row serializes");
        }
        String::from_utf8(wr.into_inner().expect("in-memory writer")).expect("utf-8")
    }
}

fn bipartite_d(n: usize, k: usize) -> f64 {
    let (n, k) = (n as f64, k as f64);
    (2.0 * (k * (n - k).powi(2) + k * k * (n - k))).sqrt() / (n * k)
}

pub fn run(demo: Demo, flow: &FlowConfig, scan: &ScanConfig) -> Result<DemoTable> {
    let (name, rows) = match demo {
        Demo::Bipartite { n } => (format!("bipartite {n}"), bipartite(n, flow)?),
        Demo::ThreeQubit => ("three-qubit".to_string(), three_qubit(scan)?),
        Demo::FourQubitFamilies => ("four-qubit-families".to_string(), four_qubit(flow)?),
        Demo::Bosons { n, l: 2 } => (format!("bosons {n} 2"), bosons(n, flow)?),
        Demo::Bosons { n: 2, l } => (format!("bosons 2 {l}"), dicke_rows(l, scan)?),
        Demo::Bosons { n, l } => {
            return Err(slocc::Error::InvalidParameters(format!(
                "bosons {n} {l}: only two particles or two levels are tabulated"
            )))
        }
        Demo::Fermions { n } => (format!("fermions {n}"), fermions(n, scan)?),
        Demo::Dicke { l } => (format!("dicke {l}"), dicke_rows(l, scan)?),
    };
    Ok(DemoTable { demo: name, rows })
}

fn collect(rows: Vec<Result<Vec<Row>>>) -> Result<Vec<Row>> {
    Ok(rows.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect())
}

fn bipartite(n: usize, flow: &FlowConfig) -> Result<Vec<Row>> {
    collect(
        (1..=n)
            .into_par_iter()
            .map(|k| {
                let v = max_entangled(n, k)?;
                let case = format!("v_{k}");
                Ok(vec![
                    Row::new(&case, "d", slocc_distance(&v, flow)?, bipartite_d(n, k), 1e-6),
                    Row::exact(&case, "morse_index", morse_index(&v, CRITICAL_TOL)?, 2 * (n - k) * (n - k)),
                ])
            })
            .collect(),
    )
}

fn three_qubit(scan: &ScanConfig) -> Result<Vec<Row>> {
    let fams = scan_critical_families(Sector::qubits(3), scan)?;
    let h = 0.5f64.sqrt();
    let names = ["GHZ", "W", "biseparable", "biseparable", "biseparable", "separable"];
    let d = [0.0, (1.0f64 / 6.0).sqrt(), h, h, h, 1.5f64.sqrt()];
    let idx = [0, 2, 6, 6, 6, 8];
    let mut rows = vec![Row::exact("all", "families", fams.len(), 6)];
    for (i, f) in fams.iter().enumerate().take(6) {
        let case = format!("{i}:{}", names[i]);
        rows.push(Row::new(&case, "d", f.d_value(), d[i], 1e-6));
        rows.push(Row::exact(&case, "morse_index", morse_index(&f.representative, CRITICAL_TOL)?, idx[i]));
    }
    Ok(rows)
}

fn four_qubit(flow: &FlowConfig) -> Result<Vec<Row>> {
    collect(
        FourQubitFamily::ALL
            .par_iter()
            .map(|&fam| {
                let v = four_qubit_family(fam, &fam.default_params())?;
                let lim = one_param_limit(&v, &fam.limit_exponents(), 20.0, 41)?;
                let res = lim.residuals.last().map_or(f64::INFINITY, |r| r.1);
                Ok(vec![
                    Row::new(fam.name(), "limit_residual", res, 0.0, 1e-8),
                    Row::new(fam.name(), "limit_span_distance", gabcd_span_distance(&lim.limit)?, 0.0, 1e-8),
                    Row::new(fam.name(), "d", slocc_distance(&v, flow)?, 0.0, 1e-4),
                ])
            })
            .collect(),
    )
}

fn bosons(n: usize, flow: &FlowConfig) -> Result<Vec<Row>> {
    collect(
        (1..=n)
            .into_par_iter()
            .map(|k| {
                let v = boson_pair(n, k)?;
                let case = format!("v_{k}");
                Ok(vec![
                    Row::new(&case, "d", slocc_distance(&v, flow)?, bipartite_d(n, k), 1e-6),
                    Row::exact(&case, "morse_index", morse_index(&v, CRITICAL_TOL)?, (n - k) * (n - k + 1)),
                ])
            })
            .collect(),
    )
}

fn fermions(n: usize, scan: &ScanConfig) -> Result<Vec<Row>> {
    let mut rows = collect(
        (1..=n / 2)
            .into_par_iter()
            .map(|k| {
                let v = fermion_pair(n, k)?;
                let case = format!("v_{k}");
                let r = n - 2 * k;
                let d = (1.0 / k as f64 - 2.0 / n as f64).max(0.0).sqrt();
                Ok(vec![
                    Row::new(&case, "d", slocc_distance(&v, &FlowConfig::default())?, d, 1e-6),
                    Row::exact(&case, "morse_index", morse_index(&v, CRITICAL_TOL)?, r * r.saturating_sub(1)),
                ])
            })
            .collect(),
    )?;
    let nonempty = zero_level_nonempty(Sector::fermionic(2, n)?, scan)?;
    rows.push(Row::exact("mu^-1(0)", "nonempty", nonempty as usize, n.is_multiple_of(2) as usize));
    Ok(rows)
}

fn dicke_rows(l: usize, scan: &ScanConfig) -> Result<Vec<Row>> {
    let cfg = ScanConfig { max_denominator: scan.max_denominator.max(2 * l), ..*scan };
    let fams = scan_critical_families(Sector::bosonic(l, 2)?, &cfg)?;
    let mut rows = vec![Row::exact("all", "families", fams.len(), l / 2 + 1)];
    for k in 0..=l / 2 {
        let v = dicke(k, l)?;
        let case = format!("|{k},{l}>");
        let rho = reduced_density(&v, 0)?;
        rows.push(Row::new(&case, "rho_11", rho[(1, 1)].re, k as f64 / l as f64, 1e-10));
        rows.push(Row::exact(&case, "morse_index", morse_index(&v, CRITICAL_TOL)?, 2 * l.div_ceil(2)));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names_and_sizes() {
        assert_eq!("bipartite 4".parse::<Demo>().unwrap(), Demo::Bipartite { n: 4 });
        assert_eq!("bosons 3".parse::<Demo>().unwrap(), Demo::Bosons { n: 3, l: 2 });
        assert_eq!("bosons 2 5".parse::<Demo>().unwrap(), Demo::Bosons { n: 2, l: 5 });
        assert_eq!("three-qubit".parse::<Demo>().unwrap(), Demo::ThreeQubit);
        assert!("three-qubit 3".parse::<Demo>().is_err());
        assert!("bipartite".parse::<Demo>().is_err());
        assert!("bipartite x".parse::<Demo>().is_err());
        assert_eq!("tetris".parse::<Demo>().unwrap_err(), UnknownDemo("tetris".into()));
    }

    #[test]
    fn bipartite_table_passes() {
        let t = run(Demo::Bipartite { n: 4 }, &FlowConfig::default(), &ScanConfig::default()).unwrap();
        assert_eq!(t.rows.len(), 8);
        assert!(t.all_pass(), "{}", t.to_text());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let t = run(Demo::Fermions { n: 5 }, &FlowConfig::default(), &ScanConfig::default()).unwrap();
        assert!(t.all_pass(), "{}", t.to_text());
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "case,quantity,computed,expected,tolerance,pass");
        assert_eq!(lines.count(), t.rows.len());
    }

    #[test]
    fn odd_fermion_zero_level_is_empty() {
        let t = run(Demo::Fermions { n: 3 }, &FlowConfig::default(), &ScanConfig::default()).unwrap();
        let row = t.rows.last().unwrap();
        assert_eq!((row.computed, row.pass), (0.0, true));
    }
}
