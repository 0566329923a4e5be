//! Adaptive bisection of the initial set.
//!
//! A leaf whose trace violates the property is split along the initial
//! symbol whose generator grew the most relative to its initial width, so the
//! number of subsets grows by one per split.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::nn::{propagate_affine, Network};
use crate::reach::{verify_last_error, RAProblem};
use crate::symbols::{SymbolId, SymbolProvider};
use crate::szono::{f_radius, Polyhedron, SZonotope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitMode {
    /// Split the leaf with the latest last error first.
    #[default]
    Backward,
    /// Split the leaf with the earliest last error first.
    Forward,
    /// Split the leaf with the largest error-symbol generators first.
    Accuracy,
}

impl std::str::FromStr for SplitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "backward" => Ok(Self::Backward),
            "forward" => Ok(Self::Forward),
            "accuracy" => Ok(Self::Accuracy),
            other => Err(Error::Problem(format!("unknown split mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionOptions {
    pub max_splits: usize,
    pub mode: SplitMode,
    /// Stop once every candidate leaf has `‖G_f‖_F` below this.
    pub tol_f: Option<f64>,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        Self {
            max_splits: 50,
            mode: SplitMode::Backward,
            tol_f: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionNode {
    pub label: usize,
    pub parent: Option<usize>,
    /// Initial subset.
    pub set: SZonotope,
    /// Last violated step, `None` when satisfied.
    pub status: Option<usize>,
    /// Final or last violating set of the node's run.
    pub witness: SZonotope,
    /// `‖G_f‖_F`: generators of the witness on non-initial symbols.
    pub error_radius: f64,
    /// The run failed outright; `status` is then the horizon cap.
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitRecord {
    pub label: usize,
    pub status: Option<usize>,
    /// Largest status among live leaves when the split was decided.
    pub live_max: Option<usize>,
    pub error_radius: f64,
    pub symbol: SymbolId,
    pub ratios: Vec<(SymbolId, f64)>,
    pub children: [usize; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionResult {
    pub is_ra_ok: bool,
    /// Every node ever created, indexed by label.
    pub nodes: Vec<PartitionNode>,
    /// Labels of the current leaves, ascending.
    pub leaves: Vec<usize>,
    pub log: Vec<SplitRecord>,
    /// Largest `‖G_f‖_F` over the leaves, before the first split and after
    /// each one.
    pub max_error_radius: Vec<f64>,
}

impl PartitionResult {
    pub fn leaf_nodes(&self) -> impl Iterator<Item = &PartitionNode> {
        self.leaves.iter().map(|&l| &self.nodes[l])
    }

    pub fn num_splits(&self) -> usize {
        self.log.len()
    }
}

/// Outcome of one evaluation of an initial subset.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub status: Option<usize>,
    pub witness: SZonotope,
}

/// `argmax_i ‖R_f[:,i]‖ / ‖R_0[:,i]‖` over the initial symbols, ties to the
/// smaller id. Falls back to the widest initial column when every ratio is
/// zero. Returns the selection and all ratios.
pub fn sym_select(initial: &SZonotope, witness: &SZonotope) -> Result<(SymbolId, Vec<(SymbolId, f64)>)> {
    let norm = |c: Option<ndarray::ArrayView1<'_, f64>>| c.map_or(0.0, |c| c.dot(&c).sqrt());
    let mut ratios = Vec::new();
    let mut widest: Option<(f64, SymbolId)> = None;
    for &id in initial.ids() {
        let r0 = norm(initial.column(id));
        if r0 == 0.0 {
            continue;
        }
        ratios.push((id, norm(witness.column(id)) / r0));
        if widest.is_none_or(|(w, wid)| r0 > w || (r0 == w && id < wid)) {
            widest = Some((r0, id));
        }
    }
    let best = ratios
        .iter()
        .filter(|(_, r)| *r > 0.0)
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(id, _)| *id);
    match best.or(widest.map(|(_, id)| id)) {
        Some(id) => Ok((id, ratios)),
        None => Err(Error::NothingToSplit),
    }
}

fn error_radius(witness: &SZonotope, initial: &SZonotope) -> f64 {
    let init: HashSet<SymbolId> = initial.ids().iter().copied().collect();
    let rest: Vec<SymbolId> = witness
        .ids()
        .iter()
        .copied()
        .filter(|id| !init.contains(id))
        .collect();
    f_radius(&witness.split_columns(&rest).0)
}

struct Partitioner<'a, F> {
    eval: F,
    opts: &'a PartitionOptions,
    horizon: usize,
    has_property: bool,
    provider: SymbolProvider,
    nodes: Vec<PartitionNode>,
    leaves: Vec<usize>,
    log: Vec<SplitRecord>,
    history: Vec<f64>,
}

impl<'a, F> Partitioner<'a, F>
where
    F: Fn(&SZonotope, usize) -> Result<Evaluation> + Sync,
{
    fn node(&self, label: usize, parent: Option<usize>, set: SZonotope, cap: usize) -> PartitionNode {
        let (status, witness, failed) = match (self.eval)(&set, cap) {
            Ok(e) => (e.status, e.witness, false),
            Err(_) => (Some(cap), set.clone(), true),
        };
        PartitionNode {
            label,
            parent,
            error_radius: error_radius(&witness, &set),
            set,
            status,
            witness,
            failed,
        }
    }

    /// A capped run only proves the steps it covered; satisfied children are
    /// re-run over the full horizon.
    fn evaluate(&self, label: usize, parent: usize, set: SZonotope, cap: usize) -> PartitionNode {
        let n = self.node(label, Some(parent), set, cap);
        if n.status.is_none() && cap < self.horizon {
            self.node(label, Some(parent), n.set, self.horizon)
        } else {
            n
        }
    }

    fn candidates(&self) -> Vec<usize> {
        self.leaves
            .iter()
            .copied()
            .filter(|&l| self.nodes[l].status.is_some() || !self.has_property)
            .collect()
    }

    fn select(&self, cands: &[usize]) -> usize {
        let by = |key: &dyn Fn(&PartitionNode) -> f64| {
            // largest key, smallest label on ties
            *cands
                .iter()
                .max_by(|&&a, &&b| {
                    key(&self.nodes[a])
                        .total_cmp(&key(&self.nodes[b]))
                        .then(b.cmp(&a))
                })
                .expect("non-empty candidates")
        };
        let t = |n: &PartitionNode| n.status.map_or(-1.0, |t| t as f64);
        match self.opts.mode {
            SplitMode::Backward => by(&t),
            SplitMode::Forward => by(&|n| -t(n)),
            SplitMode::Accuracy => by(&|n| n.error_radius),
        }
    }

    fn max_radius(&self) -> f64 {
        self.leaves
            .iter()
            .map(|&l| self.nodes[l].error_radius)
            .fold(0.0, f64::max)
    }

    fn run(mut self, x0: &SZonotope) -> Result<PartitionResult> {
        let root = self.node(0, None, x0.clone(), self.horizon);
        self.nodes.push(root);
        self.leaves.push(0);
        self.history.push(self.max_radius());
        while self.log.len() < self.opts.max_splits {
            let cands = self.candidates();
            if cands.is_empty() {
                break;
            }
            if let Some(tol) = self.opts.tol_f {
                if cands.iter().all(|&l| self.nodes[l].error_radius < tol) {
                    break;
                }
            }
            let label = self.select(&cands);
            let live_max = self.leaves.iter().filter_map(|&l| self.nodes[l].status).max();
            let parent = &self.nodes[label];
            let (symbol, ratios) = sym_select(&parent.set, &parent.witness)?;
            let (upper, lower) = parent.set.bisect_symbol(symbol, &self.provider)?;
            let cap = match self.opts.mode {
                SplitMode::Backward => live_max.unwrap_or(self.horizon),
                _ => self.horizon,
            };
            let (a, b) = (self.nodes.len(), self.nodes.len() + 1);
            let (na, nb) = std::thread::scope(|s| {
                let this = &self;
                let h = s.spawn(move || this.evaluate(a, label, upper, cap));
                let nb = this.evaluate(b, label, lower, cap);
                (h.join().expect("child evaluation panicked"), nb)
            });
            self.log.push(SplitRecord {
                label,
                status: self.nodes[label].status,
                live_max,
                error_radius: self.nodes[label].error_radius,
                symbol,
                ratios,
                children: [a, b],
            });
            self.nodes.push(na);
            self.nodes.push(nb);
            self.leaves.retain(|&l| l != label);
            self.leaves.extend([a, b]);
            self.history.push(self.max_radius());
        }
        let is_ra_ok = self.leaves.iter().all(|&l| self.nodes[l].status.is_none());
        Ok(PartitionResult {
            is_ra_ok,
            nodes: self.nodes,
            leaves: self.leaves,
            log: self.log,
            max_error_radius: self.history,
        })
    }
}

fn partition_with<F>(
    x0: &SZonotope,
    horizon: usize,
    has_property: bool,
    opts: &PartitionOptions,
    eval: F,
) -> Result<PartitionResult>
where
    F: Fn(&SZonotope, usize) -> Result<Evaluation> + Sync,
{
    Partitioner {
        eval,
        opts,
        horizon,
        has_property,
        provider: SymbolProvider::after(x0.ids()),
        nodes: Vec::new(),
        leaves: Vec::new(),
        log: Vec::new(),
        history: Vec::new(),
    }
    .run(x0)
}

/// Closed-loop partitioning of `p.x0`.
pub fn run(p: &RAProblem, opts: &PartitionOptions) -> Result<PartitionResult> {
    p.validate()?;
    let has_property = p.goal.is_some() || !p.avoid.is_empty();
    partition_with(&p.x0, p.horizon, has_property, opts, |set, cap| {
        let mut sub = p.clone();
        sub.x0 = set.clone();
        sub.protect_initial = true;
        let r = verify_last_error(&sub, cap)?;
        let mut seen = r.witness.ids();
        seen.extend_from_slice(set.ids());
        let witness = r.witness.enclosure(&SymbolProvider::after(seen.iter()));
        Ok(Evaluation {
            status: r.t_last,
            witness,
        })
    })
}

/// Partitioning for a single network evaluation: a leaf is satisfied when
/// its output set lies in `property` (always, when `None`).
pub fn run_open_loop(
    net: &Network,
    x0: &SZonotope,
    property: Option<&Polyhedron>,
    opts: &PartitionOptions,
) -> Result<PartitionResult> {
    partition_with(x0, 1, property.is_some(), opts, |set, _| {
        let out = propagate_affine(set, net, &SymbolProvider::after(set.ids()))?;
        let ok = match property {
            Some(g) => out.contained_in(g)?,
            None => true,
        };
        Ok(Evaluation {
            status: if ok { None } else { Some(1) },
            witness: out,
        })
    })
}
