//! `report.json`, `trace.csv` and `splits.json`.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use symreach::{Interval, PartitionResult, SplitMode};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Violated { step: usize, t: f64 },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn exit_code(&self) -> u8 {
        match self {
            Verdict::Verified => 0,
            Verdict::Violated { .. } => 1,
            Verdict::Inconclusive { .. } => 2,
        }
    }
}

/// Interval hull of one reachable set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepHull {
    pub step: usize,
    pub t: f64,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Symbols the set depends on; the union over leaves for partitions.
    pub symbols: usize,
}

impl StepHull {
    pub fn new(step: usize, t: f64, hull: &[Interval], symbols: usize) -> Self {
        Self {
            step,
            t,
            lo: hull.iter().map(|i| i.lo).collect(),
            hi: hull.iter().map(|i| i.hi).collect(),
            symbols,
        }
    }

    pub(crate) fn join(&mut self, hull: &[Interval], symbols: usize) {
        for (k, i) in hull.iter().enumerate() {
            self.lo[k] = self.lo[k].min(i.lo);
            self.hi[k] = self.hi[k].max(i.hi);
        }
        self.symbols += symbols;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationReport {
    pub step: usize,
    pub t: f64,
    pub kind: &'static str,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timings {
    /// Reachability or partitioning proper.
    pub analysis_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionSummary {
    pub mode: &'static str,
    pub splits: usize,
    pub leaves: usize,
    pub satisfied_leaves: usize,
    pub max_error_radius: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub seed: u64,
    pub samples: usize,
    /// (rollout, step) pairs that left the reported hull.
    pub outside: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub name: Option<String>,
    pub verdict: Verdict,
    /// Step of the reported violation; for partitions the largest
    /// time-to-last-error over the leaves.
    pub t_err: Option<usize>,
    pub violation: Option<ViolationReport>,
    pub steps: Vec<StepHull>,
    pub timings: Timings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeReport {
    pub label: usize,
    pub parent: Option<usize>,
    pub children: Option<[usize; 2]>,
    pub status: Option<usize>,
    pub failed: bool,
    pub error_radius: f64,
    /// Hull of the initial subset.
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Hull of the final or last violating set.
    pub out_lo: Vec<f64>,
    pub out_hi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitReport {
    pub label: usize,
    pub status: Option<usize>,
    pub live_max: Option<usize>,
    pub error_radius: f64,
    pub symbol: u64,
    pub ratios: Vec<(u64, f64)>,
    pub children: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitsFile {
    pub is_ra_ok: bool,
    pub mode: &'static str,
    pub leaves: Vec<usize>,
    pub nodes: Vec<NodeReport>,
    pub log: Vec<SplitReport>,
    pub max_error_radius: Vec<f64>,
}

pub fn mode_name(m: SplitMode) -> &'static str {
    match m {
        SplitMode::Backward => "backward",
        SplitMode::Forward => "forward",
        SplitMode::Accuracy => "accuracy",
    }
}

impl SplitsFile {
    pub fn new(r: &PartitionResult, mode: SplitMode) -> Self {
        let mut children = vec![None; r.nodes.len()];
        for rec in &r.log {
            children[rec.label] = Some(rec.children);
        }
        let split = |h: Vec<Interval>| -> (Vec<f64>, Vec<f64>) {
            (h.iter().map(|i| i.lo).collect(), h.iter().map(|i| i.hi).collect())
        };
        let nodes = r
            .nodes
            .iter()
            .map(|n| {
                let (lo, hi) = split(n.set.interval_hull());
                let (out_lo, out_hi) = split(n.witness.interval_hull());
                NodeReport {
                    label: n.label,
                    parent: n.parent,
                    children: children[n.label],
                    status: n.status,
                    failed: n.failed,
                    error_radius: n.error_radius,
                    lo,
                    hi,
                    out_lo,
                    out_hi,
                }
            })
            .collect();
        let log = r
            .log
            .iter()
            .map(|rec| SplitReport {
                label: rec.label,
                status: rec.status,
                live_max: rec.live_max,
                error_radius: rec.error_radius,
                symbol: rec.symbol.0,
                ratios: rec.ratios.iter().map(|(id, x)| (id.0, *x)).collect(),
                children: rec.children,
            })
            .collect();
        Self {
            is_ra_ok: r.is_ra_ok,
            mode: mode_name(mode),
            leaves: r.leaves.clone(),
            nodes,
            log,
            max_error_radius: r.max_error_radius.clone(),
        }
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn trace_csv(steps: &[StepHull]) -> String {
    let mut out = String::from("step,t,dim,lo,hi\n");
    for s in steps {
        for (d, (lo, hi)) in s.lo.iter().zip(&s.hi).enumerate() {
            let _ = writeln!(out, "{},{},{},{},{}", s.step, fmt_f64(s.t), d + 1, fmt_f64(*lo), fmt_f64(*hi));
        }
    }
    out
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write(path, &(serde_json::to_string_pretty(value)? + "\n"))
}

pub fn write_trace(path: &Path, steps: &[StepHull]) -> Result<()> {
    write(path, &trace_csv(steps))
}
