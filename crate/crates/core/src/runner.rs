//! Configuration-driven experiments: strict config parsing, a bounded worker
//! pool over parameter points, CSV/JSON artifacts and per-criterion verdicts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dense::{
    build_superoperator, iterate_to_fixed_point, leading_spectrum, trace_distance, DenseOperator, DensityMatrix,
    FixedPoint, FixedPointOptions, SpectrumOptions, StateVector, Superoperator, Symmetry,
};
use crate::diagnostics::{cmi, fidelity_correlator_pauli, write_csv, DiagnosticRow};
use crate::holography::{
    ising_chain_channel, jordan_wigner_channel, overlap_check, parity_image, verify_appendix, zero_form_steady_group,
    Appendix, OVERLAP_QUBIT_LIMIT,
};
use crate::isotns::{boundary_rdm, deformed_tc_transfer, ring_transfer_channel, WTensor};
use crate::partition::Partition;
use crate::pauli::{Pauli, PauliOperator};

/// Default output root when a config names no directory.
pub const OUTPUT_ROOT_ENV: &str = "SWSSB_OUTPUT_ROOT";

/// Critical coupling of the deformed toric code, from Ising self-duality.
pub fn deformed_tc_critical_g() -> f64 {
    (1.0 + std::f64::consts::SQRT_2).powf(-0.5)
}

/// Largest ring handled by the dense experiments.
const DENSE_RING_LIMIT: usize = 10;
/// Largest ring for the deformed toric-code sector blocks.
const DEFORMED_RING_LIMIT: usize = 8;

type BoxError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("config: {0}")]
    Config(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("resource budget: {0}")]
    Budget(String),
    #[error("io at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("writing results: {0}")]
    Output(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Fig4Spectrum,
    Fig4Cmi,
    Fig6DeformedTc,
    FixedPointSuite,
    AppendixVerify,
    DepthSweep,
    OverlapCheck,
    JwCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Fig4Spectrum => "fig4_spectrum",
            ExperimentKind::Fig4Cmi => "fig4_cmi",
            ExperimentKind::Fig6DeformedTc => "fig6_deformed_tc",
            ExperimentKind::FixedPointSuite => "fixed_point_suite",
            ExperimentKind::AppendixVerify => "appendix_verify",
            ExperimentKind::DepthSweep => "depth_sweep",
            ExperimentKind::OverlapCheck => "overlap_check",
            ExperimentKind::JwCheck => "jw_check",
        }
    }

    /// Parameter keys (beyond the common ones) this experiment accepts, and which of them are required.
    fn schema(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            ExperimentKind::Fig4Spectrum => (&["L", "g", "n_eigs"], &["L", "g"]),
            ExperimentKind::Fig4Cmi => (&["L", "g", "partition"], &["L", "g"]),
            ExperimentKind::Fig6DeformedTc => (&["L", "g", "partition"], &["L", "g"]),
            ExperimentKind::FixedPointSuite => (&["L", "p_x", "p_z"], &["L"]),
            ExperimentKind::AppendixVerify => (&["appendices"], &["appendices"]),
            ExperimentKind::DepthSweep => (&["L", "depth", "p_x", "p_z"], &["L", "depth", "p_z"]),
            ExperimentKind::OverlapCheck => (&["lx", "ly", "g_x", "g_z"], &["lx", "ly", "g_x", "g_z"]),
            ExperimentKind::JwCheck => (&["L", "p_a", "p_b"], &["L"]),
        }
    }
}

/// Ring partition `A(a) B(b1) C(c) B(b2)` starting at `offset` (sites).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSpec {
    pub a: usize,
    pub b1: usize,
    pub c: usize,
    pub b2: usize,
    #[serde(default)]
    pub offset: usize,
}

impl PartitionSpec {
    pub fn build(&self, l: usize) -> Result<Partition, crate::partition::PartitionError> {
        Partition::ring_arcs(l, self.a, self.b1, self.c, self.b2, self.offset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Unit-magnitude threshold for counting steady states (dimensionless).
    pub epsilon_deg: f64,
    /// Absolute tolerance on verdict comparisons (bits for CMI, otherwise dimensionless).
    pub check: f64,
    /// Trace-norm stopping tolerance of fixed-point iteration.
    pub fixed_point: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { epsilon_deg: 1e-8, check: 1e-9, fixed_point: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(rename = "L", default, skip_serializing_if = "Vec::is_empty")]
    pub l: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub g: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub depth: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lx: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ly: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub appendices: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_eigs: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            l: Vec::new(),
            g: Vec::new(),
            depth: Vec::new(),
            p_x: None,
            p_z: None,
            p_a: None,
            p_b: None,
            g_x: None,
            g_z: None,
            lx: None,
            ly: Vec::new(),
            partition: None,
            appendices: Vec::new(),
            n_eigs: None,
            tolerances: Tolerances::default(),
            threads: None,
            output_dir: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, RunnerError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| RunnerError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn present_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let mut mark = |cond: bool, key: &'static str| {
            if cond {
                keys.push(key);
            }
        };
        mark(!self.l.is_empty(), "L");
        mark(!self.g.is_empty(), "g");
        mark(!self.depth.is_empty(), "depth");
        mark(self.p_x.is_some(), "p_x");
        mark(self.p_z.is_some(), "p_z");
        mark(self.p_a.is_some(), "p_a");
        mark(self.p_b.is_some(), "p_b");
        mark(self.g_x.is_some(), "g_x");
        mark(self.g_z.is_some(), "g_z");
        mark(self.lx.is_some(), "lx");
        mark(!self.ly.is_empty(), "ly");
        mark(self.partition.is_some(), "partition");
        mark(!self.appendices.is_empty(), "appendices");
        mark(self.n_eigs.is_some(), "n_eigs");
        keys
    }

    /// Checks keys against the experiment's schema, then value ranges and resource budgets.
    pub fn validate(&self) -> Result<(), RunnerError> {
        let name = self.experiment.name();
        let (allowed, required) = self.experiment.schema();
        let present = self.present_keys();
        if let Some(k) = present.iter().find(|k| !allowed.contains(k)) {
            return Err(RunnerError::Config(format!("key `{k}` is not a parameter of {name}")));
        }
        if let Some(k) = required.iter().find(|k| !present.contains(k)) {
            return Err(RunnerError::Config(format!("{name} requires `{k}`")));
        }
        let cfg_err = |msg: String| Err(RunnerError::Config(msg));
        let t = &self.tolerances;
        if !(t.epsilon_deg > 0.0 && t.check > 0.0 && t.fixed_point > 0.0) {
            return cfg_err("tolerances must be positive".into());
        }
        if self.threads == Some(0) {
            return cfg_err("threads must be at least 1".into());
        }
        for (key, p) in [("p_x", self.p_x), ("p_z", self.p_z), ("p_a", self.p_a), ("p_b", self.p_b)] {
            if let Some(p) = p {
                if !(0.0..=1.0).contains(&p) {
                    return cfg_err(format!("{key} = {p} is not a probability"));
                }
            }
        }
        if let Some(&l) = self.l.iter().find(|&&l| l < 2) {
            return cfg_err(format!("L = {l} is below 2"));
        }
        match self.experiment {
            ExperimentKind::Fig4Spectrum | ExperimentKind::Fig4Cmi => {
                if let Some(g) = self.g.iter().find(|g| !(-1.0..=1.0).contains(*g)) {
                    return cfg_err(format!("g = {g} outside [-1, 1]"));
                }
                self.budget_ring(DENSE_RING_LIMIT)?;
                if self.experiment == ExperimentKind::Fig4Spectrum && self.n_eigs == Some(0) {
                    return cfg_err("n_eigs must be positive".into());
                }
            }
            ExperimentKind::Fig6DeformedTc => {
                if let Some(g) = self.g.iter().find(|&&g| !(g > 0.0 && g <= 1.0)) {
                    return cfg_err(format!("g = {g} outside (0, 1]"));
                }
                self.budget_ring(DEFORMED_RING_LIMIT)?;
            }
            ExperimentKind::FixedPointSuite | ExperimentKind::JwCheck => self.budget_ring(DENSE_RING_LIMIT)?,
            ExperimentKind::DepthSweep => {
                self.budget_ring(DENSE_RING_LIMIT)?;
                if self.depth.contains(&0) {
                    return cfg_err("depths start at 1".into());
                }
            }
            ExperimentKind::AppendixVerify => {
                for a in &self.appendices {
                    a.parse::<Appendix>().map_err(|e| RunnerError::Config(e.to_string()))?;
                }
            }
            ExperimentKind::OverlapCheck => {
                let lx = self.lx.unwrap_or(0);
                if lx < 2 || self.ly.iter().any(|&ly| ly < 2) {
                    return cfg_err("overlap torus needs lx, ly ≥ 2".into());
                }
                if let Some(&ly) = self.ly.iter().find(|&&ly| 2 * lx * ly > OVERLAP_QUBIT_LIMIT) {
                    return Err(RunnerError::Budget(format!(
                        "{lx}×{ly} torus has {} qubits, limit {OVERLAP_QUBIT_LIMIT}",
                        2 * lx * ly
                    )));
                }
            }
        }
        if let Some(spec) = self.partition {
            for &l in &self.l {
                spec.build(l).map_err(|e| RunnerError::Config(format!("partition at L = {l}: {e}")))?;
            }
        }
        Ok(())
    }

    fn budget_ring(&self, limit: usize) -> Result<(), RunnerError> {
        match self.l.iter().find(|&&l| l > limit) {
            Some(l) => Err(RunnerError::Budget(format!("L = {l} exceeds {limit} for {}", self.experiment.name()))),
            None => Ok(()),
        }
    }

    fn partition_for(&self, l: usize) -> Result<Partition, crate::partition::PartitionError> {
        match self.partition {
            Some(spec) => spec.build(l),
            None => Partition::default_ring(l),
        }
    }
}

/// Named configs reproducing the figure data at desk scale.
pub fn preset(name: &str) -> Result<Vec<ExperimentConfig>, RunnerError> {
    let grid = |n: usize, lo: f64, hi: f64| -> Vec<f64> {
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    };
    let with = |kind: ExperimentKind, f: &dyn Fn(&mut ExperimentConfig)| {
        let mut c = ExperimentConfig::new(kind);
        f(&mut c);
        c
    };
    let configs = match name {
        "fig4" => vec![
            with(ExperimentKind::Fig4Spectrum, &|c| {
                c.l = vec![4, 6, 8];
                c.g = grid(21, -1.0, 1.0);
            }),
            with(ExperimentKind::Fig4Cmi, &|c| {
                c.l = vec![4, 6, 8];
                c.g = grid(21, -1.0, 1.0);
            }),
        ],
        "fig6" => vec![with(ExperimentKind::Fig6DeformedTc, &|c| {
            c.l = vec![4, 6];
            c.g = (1..=25).map(|k| k as f64 / 25.0).collect();
        })],
        "appendices" => vec![with(ExperimentKind::AppendixVerify, &|c| {
            c.appendices = ["A", "D", "E", "F"].map(String::from).to_vec();
        })],
        "fixed_point" => vec![with(ExperimentKind::FixedPointSuite, &|c| {
            c.l = vec![6, 7, 8, 9, 10];
        })],
        "depth" => vec![with(ExperimentKind::DepthSweep, &|c| {
            c.l = vec![8];
            c.p_z = Some(0.3);
            c.depth = vec![1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48];
        })],
        "overlap" => vec![with(ExperimentKind::OverlapCheck, &|c| {
            c.lx = Some(3);
            c.ly = vec![2, 3, 4];
            c.g_x = Some(0.3);
            c.g_z = Some(0.3);
        })],
        "jw" => vec![with(ExperimentKind::JwCheck, &|c| {
            c.l = vec![4];
        })],
        other => return Err(RunnerError::UnknownPreset(other.to_string())),
    };
    Ok(configs)
}

pub const PRESETS: &[&str] = &["fig4", "fig6", "appendices", "fixed_point", "depth", "overlap", "jw"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    /// Acceptance criterion id, e.g. `C4`.
    pub criterion: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub label: String,
    pub ok: bool,
    pub error: Option<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub points: Vec<PointReport>,
    pub verdicts: Vec<Verdict>,
    pub wall_seconds: f64,
    #[serde(skip)]
    pub rows: Vec<DiagnosticRow>,
}

impl RunReport {
    /// Every point finished and every verdict passed.
    pub fn passed(&self) -> bool {
        self.points.iter().all(|p| p.ok) && self.verdicts.iter().all(|v| v.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Point {
    Spectrum { l: usize, g: f64 },
    WCmi { l: usize, g: f64 },
    DeformedTc { l: usize, g: f64 },
    Steady { l: usize },
    Appendix(Appendix),
    Depth { l: usize },
    Overlap { ly: usize },
    Jw { l: usize },
}

impl Point {
    fn label(&self) -> String {
        match self {
            Point::Spectrum { l, g } | Point::WCmi { l, g } | Point::DeformedTc { l, g } => format!("L={l} g={g}"),
            Point::Steady { l } | Point::Depth { l } | Point::Jw { l } => format!("L={l}"),
            Point::Appendix(a) => format!("appendix {a}"),
            Point::Overlap { ly } => format!("ly={ly}"),
        }
    }
}

fn points(cfg: &ExperimentConfig) -> Vec<Point> {
    let grid = |f: fn(usize, f64) -> Point| -> Vec<Point> {
        cfg.l.iter().flat_map(|&l| cfg.g.iter().map(move |&g| f(l, g))).collect()
    };
    match cfg.experiment {
        ExperimentKind::Fig4Spectrum => grid(|l, g| Point::Spectrum { l, g }),
        ExperimentKind::Fig4Cmi => grid(|l, g| Point::WCmi { l, g }),
        ExperimentKind::Fig6DeformedTc => grid(|l, g| Point::DeformedTc { l, g }),
        ExperimentKind::FixedPointSuite => cfg.l.iter().map(|&l| Point::Steady { l }).collect(),
        ExperimentKind::AppendixVerify => {
            cfg.appendices.iter().map(|a| Point::Appendix(a.parse().expect("validated"))).collect()
        }
        ExperimentKind::DepthSweep => cfg.l.iter().map(|&l| Point::Depth { l }).collect(),
        ExperimentKind::OverlapCheck => cfg.ly.iter().map(|&ly| Point::Overlap { ly }).collect(),
        ExperimentKind::JwCheck => cfg.l.iter().map(|&l| Point::Jw { l }).collect(),
    }
}

struct RowSink<'a> {
    experiment: &'a str,
    rows: Vec<DiagnosticRow>,
}

impl RowSink<'_> {
    fn push(&mut self, l: usize, g_or_p: f64, depth: Option<usize>, quantity: impl Into<String>, value: f64, meta: impl Into<String>) {
        self.rows.push(DiagnosticRow {
            experiment: self.experiment.to_string(),
            l,
            g_or_p,
            depth,
            quantity: quantity.into(),
            value,
            tolerance_meta: meta.into(),
        });
    }
}

fn z_pair(l: usize, i: usize, j: usize) -> Result<PauliOperator, BoxError> {
    Ok(PauliOperator::on_sites(l, Pauli::Z, &[i, j])?)
}

/// Normalized gap `1 − |λ₁|/|λ₀|` of the even-parity block of the deformed toric-code transfer map.
pub fn deformed_tc_even_gap(g: f64, l: usize) -> Result<f64, BoxError> {
    let t = deformed_tc_transfer(g, l)?;
    let block = Superoperator::sector_block(t.channel(), &Symmetry::all_z(l), 1)?;
    let opts = SpectrumOptions { n_eigs: 4, dense_limit: 5000, ..SpectrumOptions::default() };
    let r = leading_spectrum(&block, &opts, None)?;
    Ok(1.0 - r.magnitudes[1] / r.magnitudes[0])
}

/// CMI of the boundary state in the even-parity sector.
pub fn deformed_tc_cmi(g: f64, l: usize, partition: &Partition, tol: f64) -> Result<f64, BoxError> {
    let t = deformed_tc_transfer(g, l)?;
    let rho = boundary_rdm(&t, Some(1), FixedPointOptions { tol, ..FixedPointOptions::default() })?;
    Ok(cmi(&rho, partition)?)
}

/// CMI of the steady state of the W-tensor ring channel, in the even sector when `g ≥ 0`.
pub fn w_channel_cmi(g: f64, l: usize, partition: &Partition, tol: f64) -> Result<f64, BoxError> {
    let t = ring_transfer_channel(&WTensor::new(g)?, l)?;
    let sector = if g < 0.0 { None } else { Some(1) };
    let rho = boundary_rdm(&t, sector, FixedPointOptions { tol, ..FixedPointOptions::default() })?;
    Ok(cmi(&rho, partition)?)
}

/// Fidelity correlators `F_{0,r}`, `r = 1..=L/2`, of the 1d channel after each depth in `depths` (ascending).
pub fn depth_profile(l: usize, p_x: f64, p_z: f64, depths: &[usize]) -> Result<Vec<(usize, Vec<f64>)>, BoxError> {
    let ch = ising_chain_channel(l, p_x, p_z)?;
    let mut rho = DensityMatrix::plus_product(l).into_operator();
    let mut done = 0;
    let mut out = Vec::new();
    let mut sorted = depths.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for n in sorted {
        while done < n {
            rho = ch.apply(&rho)?;
            done += 1;
        }
        let state = DensityMatrix::normalized(&rho)?;
        let f = (1..=l / 2).map(|r| fidelity_correlator_pauli(&state, &z_pair(l, 0, r)?).map_err(BoxError::from)).collect::<Result<Vec<_>, _>>()?;
        out.push((n, f));
    }
    Ok(out)
}

fn converged(fp: &FixedPoint) -> Result<(), BoxError> {
    if fp.converged {
        Ok(())
    } else {
        Err(format!("no fixed point after {} iterations (residual {:e})", fp.iterations, fp.residual).into())
    }
}

fn eval(cfg: &ExperimentConfig, point: &Point) -> Result<Vec<DiagnosticRow>, BoxError> {
    let mut sink = RowSink { experiment: cfg.experiment.name(), rows: Vec::new() };
    let tol = cfg.tolerances;
    match *point {
        Point::Spectrum { l, g } => {
            let t = ring_transfer_channel(&WTensor::new(g)?, l)?;
            let sup = build_superoperator(t.channel())?;
            let n_eigs = cfg.n_eigs.unwrap_or(l + 4);
            let opts = SpectrumOptions { n_eigs, epsilon_deg: tol.epsilon_deg, krylov_block: 12, ..SpectrumOptions::default() };
            let r = leading_spectrum(&sup, &opts, None)?;
            let meta = format!("epsilon_deg={:e}", tol.epsilon_deg);
            sink.push(l, g, None, "degeneracy", r.degeneracy as f64, meta.clone());
            sink.push(l, g, None, "gap", r.gap.unwrap_or(f64::NAN), meta.clone());
            for (k, m) in r.magnitudes.iter().enumerate() {
                sink.push(l, g, None, format!("magnitude_{k}"), *m, meta.clone());
            }
        }
        Point::WCmi { l, g } => {
            let value = w_channel_cmi(g, l, &cfg.partition_for(l)?, tol.fixed_point)?;
            sink.push(l, g, None, "cmi_bits", value, format!("fixed_point_tol={:e}", tol.fixed_point));
        }
        Point::DeformedTc { l, g } => {
            sink.push(l, g, None, "even_gap", deformed_tc_even_gap(g, l)?, "normalized");
            let value = deformed_tc_cmi(g, l, &cfg.partition_for(l)?, tol.fixed_point)?;
            sink.push(l, g, None, "cmi_bits", value, format!("fixed_point_tol={:e}", tol.fixed_point));
        }
        Point::Steady { l } => {
            let (p_x, p_z) = (cfg.p_x.unwrap_or(0.5), cfg.p_z.unwrap_or(0.5));
            let ch = ising_chain_channel(l, p_x, p_z)?;
            let fp = iterate_to_fixed_point(
                &ch,
                DensityMatrix::plus_product(l).operator(),
                FixedPointOptions { tol: tol.fixed_point, ..FixedPointOptions::default() },
            )?;
            converged(&fp)?;
            let rho = DensityMatrix::normalized(&fp.state)?;
            let target = DensityMatrix::from_stabilizers(&zero_form_steady_group(l)?);
            let meta = format!("p_x={p_x}");
            sink.push(l, p_z, None, "iterations", fp.iterations as f64, meta.clone());
            sink.push(l, p_z, None, "trace_distance", trace_distance(rho.operator(), target.operator())?, meta.clone());
            sink.push(l, p_z, None, "cmi_bits", cmi(&rho, &Partition::default_ring(l)?)?, meta.clone());
            let far = l / 2;
            sink.push(l, p_z, None, "fidelity_correlator", fidelity_correlator_pauli(&rho, &z_pair(l, 0, far)?)?, meta.clone());
            sink.push(l, p_z, None, "zz", rho.expectation(&z_pair(l, 0, far)?).re, meta);
        }
        Point::Appendix(which) => {
            let report = verify_appendix(which)?;
            for c in report.checks {
                sink.push(0, 0.0, None, "check_passed", if c.passed { 1.0 } else { 0.0 }, format!("{which}/{}", c.name));
            }
        }
        Point::Depth { l } => {
            let (p_x, p_z) = (cfg.p_x.unwrap_or(0.5), cfg.p_z.expect("validated"));
            for (n, fs) in depth_profile(l, p_x, p_z, &cfg.depth)? {
                for (r, f) in fs.iter().enumerate() {
                    sink.push(l, p_z, Some(n), format!("fidelity_r{}", r + 1), *f, format!("p_x={p_x}"));
                }
            }
        }
        Point::Overlap { ly } => {
            let (lx, g_x, g_z) = (cfg.lx.expect("validated"), cfg.g_x.expect("validated"), cfg.g_z.expect("validated"));
            let r = overlap_check(g_x, g_z, lx, ly)?;
            let meta = format!("g_x={g_x}");
            sink.push(lx, g_z, Some(ly), "overlap", r.overlap, meta.clone());
            sink.push(lx, g_z, Some(ly), "deviation", r.deviation, meta.clone());
            sink.push(lx, g_z, Some(ly), "series", r.series, meta);
        }
        Point::Jw { l } => {
            let (p_a, p_b) = (cfg.p_a.unwrap_or(0.5), cfg.p_b.unwrap_or(0.5));
            let ch = jordan_wigner_channel(l, p_a, p_b)?;
            let input = StateVector::zeros_state(l).density();
            let fp = iterate_to_fixed_point(&ch, &input, FixedPointOptions { tol: tol.fixed_point, ..FixedPointOptions::default() })?;
            converged(&fp)?;
            let parity = parity_image(l)?;
            let target = DensityMatrix::from_stabilizers(&crate::pauli::StabilizerGroup::new(l, vec![parity.clone()])?);
            let meta = format!("p_b={p_b}");
            sink.push(l, p_a, None, "trace_distance", trace_distance(&fp.state, target.operator())?, meta.clone());
            sink.push(l, p_a, None, "parity_commutator", ch.symmetry_commutator(&DenseOperator::from_pauli(&parity))?, meta);
        }
    }
    Ok(sink.rows)
}

fn rows_where<'a>(rows: &'a [DiagnosticRow], quantity: &'a str) -> impl Iterator<Item = &'a DiagnosticRow> + 'a {
    rows.iter().filter(move |r| r.quantity == quantity)
}

/// Least-squares slope of `−ln gap` against `ln L`.
pub fn gap_exponent(points: &[(usize, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|&(l, _)| (l as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, gap)| -gap.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

fn expected_degeneracy(l: usize, g: f64) -> usize {
    if g > 0.0 {
        2
    } else if g < 0.0 {
        1
    } else {
        l + 1
    }
}

fn verdicts(cfg: &ExperimentConfig, rows: &[DiagnosticRow]) -> Vec<Verdict> {
    let tol = cfg.tolerances.check;
    let mut out = Vec::new();
    let mut verdict = |criterion: &str, passed: bool, detail: String| {
        out.push(Verdict { criterion: criterion.to_string(), passed, detail });
    };
    match cfg.experiment {
        ExperimentKind::Fig4Spectrum => {
            let bad: Vec<String> = rows_where(rows, "degeneracy")
                .filter(|r| r.value as usize != expected_degeneracy(r.l, r.g_or_p))
                .map(|r| format!("L={} g={} degeneracy {}", r.l, r.g_or_p, r.value))
                .collect();
            let n = rows_where(rows, "degeneracy").count();
            verdict("C4", bad.is_empty() && n > 0, if bad.is_empty() { format!("{n} points match 2 / 1 / L+1") } else { bad.join("; ") });
            let critical: Vec<(usize, f64)> = rows_where(rows, "gap").filter(|r| r.g_or_p == 0.0).map(|r| (r.l, r.value)).collect();
            if critical.len() >= 3 {
                let alpha = gap_exponent(&critical);
                verdict("C5", (1.6..=2.4).contains(&alpha), format!("fitted exponent {alpha:.4} from {critical:?}"));
            }
        }
        ExperimentKind::Fig4Cmi => {
            let default_part = cfg.partition.is_none() || cfg.partition == Some(PartitionSpec { a: 3, b1: 1, c: 3, b2: 1, offset: 0 });
            let at8: Vec<&DiagnosticRow> = rows_where(rows, "cmi_bits").filter(|r| r.l == 8).collect();
            if default_part && !at8.is_empty() {
                let mut fails = Vec::new();
                for r in &at8 {
                    let g = r.g_or_p;
                    if (g == 0.5 || g == 1.0) && r.value < 0.9 {
                        fails.push(format!("g={g} cmi {:.6} < 0.9", r.value));
                    }
                    if (g == -0.5 || g == -1.0) && r.value > 0.05 {
                        fails.push(format!("g={g} cmi {:.6} > 0.05", r.value));
                    }
                }
                let mean = |pos: bool| {
                    let v: Vec<f64> = at8.iter().filter(|r| (r.g_or_p > 0.0) == pos && r.g_or_p != 0.0).map(|r| r.value).collect();
                    v.iter().sum::<f64>() / v.len().max(1) as f64
                };
                if mean(true) <= mean(false) {
                    fails.push("no jump across g = 0".into());
                }
                let detail = if fails.is_empty() { format!("{} points at L=8", at8.len()) } else { fails.join("; ") };
                verdict("C6", fails.is_empty(), detail);
            }
        }
        ExperimentKind::Fig6DeformedTc => {
            let g_c = deformed_tc_critical_g();
            let mut minima = Vec::new();
            for &l in &cfg.l {
                let best = rows_where(rows, "even_gap").filter(|r| r.l == l).min_by(|a, b| a.value.total_cmp(&b.value));
                if let Some(b) = best {
                    minima.push((l, b.g_or_p, b.value));
                }
            }
            if !minima.is_empty() {
                let located = minima.iter().all(|&(_, g, _)| (g - g_c).abs() <= 0.08);
                let deepens = minima.windows(2).all(|w| w[1].2 < w[0].2);
                verdict("C7-gap", located && deepens, format!("minima (L, g, gap) {minima:?}, g_c = {g_c:.4}"));
            }
            let near = |target: f64, l: usize| {
                rows_where(rows, "cmi_bits").filter(|r| r.l == l && (r.g_or_p - target).abs() <= 0.011).min_by(|a, b| {
                    (a.g_or_p - target).abs().total_cmp(&(b.g_or_p - target).abs())
                })
            };
            let mut parts = Vec::new();
            let mut ok = true;
            for &l in &cfg.l {
                if let (Some(hi), Some(lo)) = (near(0.95, l), near(0.35, l)) {
                    ok &= hi.value <= 0.1 && lo.value >= 0.9;
                    parts.push(format!("L={l}: cmi(g={}) = {:.4}, cmi(g={}) = {:.4}", hi.g_or_p, hi.value, lo.g_or_p, lo.value));
                }
            }
            if !parts.is_empty() {
                verdict("C7-cmi", ok, parts.join("; "));
            }
        }
        ExperimentKind::FixedPointSuite => {
            if cfg.p_x.unwrap_or(0.5) == 0.5 && cfg.p_z.unwrap_or(0.5) == 0.5 {
                let mut fails = Vec::new();
                for r in rows {
                    let bad = match r.quantity.as_str() {
                        "trace_distance" => r.value > cfg.tolerances.fixed_point,
                        "cmi_bits" | "fidelity_correlator" => (r.value - 1.0).abs() > tol,
                        "zz" => r.value.abs() > cfg.tolerances.fixed_point,
                        _ => false,
                    };
                    if bad {
                        fails.push(format!("L={} {} = {:e}", r.l, r.quantity, r.value));
                    }
                }
                let detail = if fails.is_empty() { format!("L = {:?}", cfg.l) } else { fails.join("; ") };
                verdict("C1", fails.is_empty(), detail);
            }
        }
        ExperimentKind::AppendixVerify => {
            let failed: Vec<&str> = rows.iter().filter(|r| r.value != 1.0).map(|r| r.tolerance_meta.as_str()).collect();
            let detail = if failed.is_empty() { format!("{} checks", rows.len()) } else { failed.join(", ") };
            verdict("C3", failed.is_empty() && !rows.is_empty(), detail);
        }
        ExperimentKind::DepthSweep => {
            let mut fails = Vec::new();
            for &l in &cfg.l {
                let mut table: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
                for r in rows.iter().filter(|r| r.l == l) {
                    table.entry(r.depth.unwrap_or(0)).or_default().push(r.value);
                }
                fails.extend(depth_profile_failures(l, &table.into_iter().collect::<Vec<_>>()));
            }
            let detail = if fails.is_empty() { format!("L = {:?}, depths {:?}", cfg.l, cfg.depth) } else { fails.join("; ") };
            verdict("C9", fails.is_empty(), detail);
        }
        ExperimentKind::OverlapCheck => {
            let devs: Vec<(usize, f64)> = rows_where(rows, "deviation").map(|r| (r.depth.unwrap_or(0), r.value)).collect();
            let ratios: Vec<f64> = devs.windows(2).map(|w| w[0].1 / w[1].1).collect();
            let consecutive = devs.windows(2).all(|w| w[1].0 == w[0].0 + 1);
            verdict(
                "C8",
                consecutive && !ratios.is_empty() && ratios.iter().all(|&r| r >= 2.0),
                format!("deviations {devs:?}, ratios {ratios:?}"),
            );
        }
        ExperimentKind::JwCheck => {
            let td = rows_where(rows, "trace_distance").map(|r| r.value).fold(0.0, f64::max);
            let comm = rows_where(rows, "parity_commutator").map(|r| r.value).fold(0.0, f64::max);
            let steady_ok = cfg.p_a.unwrap_or(0.5) != 0.5 || cfg.p_b.unwrap_or(0.5) != 0.5 || td <= cfg.tolerances.fixed_point;
            verdict("C10", steady_ok && comm <= tol, format!("trace distance {td:e}, Kraus commutator {comm:e}"));
        }
    }
    out
}

/// Monotonicity and plateau failures for a table of `(depth, [F_{0,r}])` in ascending depth.
pub fn depth_profile_failures(l: usize, table: &[(usize, Vec<f64>)]) -> Vec<String> {
    const SLACK: f64 = 1e-12;
    const PLATEAU: f64 = 1e-6;
    let mut fails = Vec::new();
    for w in table.windows(2) {
        for (r, (a, b)) in w[0].1.iter().zip(&w[1].1).enumerate() {
            if *b < a - SLACK {
                fails.push(format!("L={l} r={} decreases from depth {} to {}", r + 1, w[0].0, w[1].0));
            }
        }
    }
    for (n, fs) in table {
        if fs.windows(2).any(|p| p[1] > p[0] + SLACK) {
            fails.push(format!("L={l} depth {n}: not monotone in r"));
        }
    }
    if let Some((n, fs)) = table.last() {
        let spread = fs.iter().copied().fold(f64::NEG_INFINITY, f64::max) - fs.iter().copied().fold(f64::INFINITY, f64::min);
        if spread > PLATEAU {
            fails.push(format!("L={l} depth {n}: plateau spread {spread:e}"));
        }
    }
    fails
}

/// Runs every point of `cfg` on a pool of `cfg.threads` workers; results keep config order.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, RunnerError> {
    cfg.validate()?;
    let start = Instant::now();
    let pts = points(cfg);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| RunnerError::Pool(e.to_string()))?;
    let outcomes: Vec<(PointReport, Vec<DiagnosticRow>)> = pool.install(|| {
        pts.par_iter()
            .map(|p| {
                let t0 = Instant::now();
                let result = eval(cfg, p);
                let seconds = t0.elapsed().as_secs_f64();
                match result {
                    Ok(rows) => (PointReport { label: p.label(), ok: true, error: None, seconds }, rows),
                    Err(e) => (PointReport { label: p.label(), ok: false, error: Some(e.to_string()), seconds }, Vec::new()),
                }
            })
            .collect()
    });
    let mut points_out = Vec::with_capacity(outcomes.len());
    let mut rows = Vec::new();
    for (p, r) in outcomes {
        points_out.push(p);
        rows.extend(r);
    }
    let verdicts = verdicts(cfg, &rows);
    Ok(RunReport { config: cfg.clone(), points: points_out, verdicts, wall_seconds: start.elapsed().as_secs_f64(), rows })
}

/// Output directory: the config's own, else `$SWSSB_OUTPUT_ROOT/<experiment>`, else `swssb-out/<experiment>`.
pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    if let Some(dir) = &cfg.output_dir {
        return dir.clone();
    }
    let root = std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("swssb-out"));
    root.join(cfg.experiment.name())
}

/// `magnitude_3` and `fidelity_r2` share files with their siblings.
fn quantity_family(q: &str) -> &str {
    q.trim_end_matches(|c: char| c.is_ascii_digit()).trim_end_matches('_')
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunnerError + '_ {
    move |source| RunnerError::Io { path: path.to_path_buf(), source }
}

/// Writes `config.toml`, `results.csv`, one CSV per quantity family and `report.json` into `dir`.
pub fn write_artifacts(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, RunnerError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    let mut write = |name: &str, bytes: Vec<u8>| -> Result<(), RunnerError> {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(io_err(&path))?;
        written.push(path);
        Ok(())
    };
    write("config.toml", report.config.to_toml().into_bytes())?;
    let csv_bytes = |rows: &[DiagnosticRow]| -> Result<Vec<u8>, RunnerError> {
        let mut buf = Vec::new();
        write_csv(rows, &mut buf).map_err(|e| RunnerError::Output(e.to_string()))?;
        Ok(buf)
    };
    write("results.csv", csv_bytes(&report.rows)?)?;
    let mut families: BTreeMap<&str, Vec<DiagnosticRow>> = BTreeMap::new();
    for r in &report.rows {
        families.entry(quantity_family(&r.quantity)).or_default().push(r.clone());
    }
    for (family, rows) in families {
        write(&format!("{family}.csv"), csv_bytes(&rows)?)?;
    }
    write("report.json", report.to_json().into_bytes())?;
    Ok(written)
}
