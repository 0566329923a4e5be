//! TOML problem configurations.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};
use serde::Deserialize;
use symreach::{
    AffineMap, Controller, DisturbanceSpec, Engine, HoldMode, Network, PartitionOptions, Plant,
    PolyOptions, Polyhedron, RAProblem, SZonotope, SplitMode, SymbolProvider, TimedSet,
};

use crate::error::{CliError, Result};
use crate::network::load_network;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default)]
    pub name: Option<String>,
    /// Weight file, relative to the config file.
    pub network: PathBuf,
    pub horizon: usize,
    #[serde(default = "one")]
    pub hold: usize,
    #[serde(default = "default_order")]
    pub order: usize,
    /// Duration of one plant step, used for the `t` column.
    #[serde(default = "unit_dt")]
    pub dt: f64,
    #[serde(default)]
    pub hold_mode: HoldModeConfig,
    /// Random closed-loop rollouts checked against the computed trace.
    #[serde(default)]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: HashMap<String, f64>,
    pub dynamics: DynamicsConfig,
    pub initial: BoxConfig,
    #[serde(default)]
    pub controller: ControllerConfig,
    #[serde(default)]
    pub engine: EngineConfig,
    #[serde(default)]
    pub goal: Option<SetConfig>,
    #[serde(default)]
    pub avoid: Vec<SetConfig>,
    #[serde(default)]
    pub partition: PartitionConfig,
}

fn one() -> usize {
    1
}

fn default_order() -> usize {
    100
}

fn unit_dt() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum HoldModeConfig {
    #[default]
    Symbolic,
    Decorrelated,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    /// One next-state expression per state, over `x1..`, `u1..`, `w1..`
    /// and the names in `params`.
    pub equations: Vec<String>,
    pub inputs: usize,
    /// Half-widths of the disturbance symbols `w1..`.
    #[serde(default)]
    pub disturbance: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineConfig {
    pub matrix: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerConfig {
    /// Map from state to network input.
    #[serde(default)]
    pub pre: Option<AffineConfig>,
    /// Map from network output to plant input.
    #[serde(default)]
    pub post: Option<AffineConfig>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    #[default]
    Affine,
    Poly,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    #[serde(default)]
    pub kind: EngineKind,
    #[serde(default = "default_poly_order")]
    pub poly_order: u32,
    #[serde(default = "default_budget")]
    pub monomial_budget: usize,
    #[serde(default = "default_max_degree")]
    pub max_degree: u32,
    #[serde(default = "default_refine_depth")]
    pub refine_depth: usize,
}

fn default_poly_order() -> u32 {
    PolyOptions::default().order
}

fn default_budget() -> usize {
    PolyOptions::default().monomial_budget
}

fn default_max_degree() -> u32 {
    PolyOptions::default().max_degree
}

fn default_refine_depth() -> usize {
    PolyOptions::default().refine_depth
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            kind: EngineKind::Affine,
            poly_order: default_poly_order(),
            monomial_budget: default_budget(),
            max_degree: default_max_degree(),
            refine_depth: default_refine_depth(),
        }
    }
}

impl EngineConfig {
    pub fn engine(&self) -> Engine {
        match self.kind {
            EngineKind::Affine => Engine::Affine,
            EngineKind::Poly => Engine::Poly(PolyOptions {
                order: self.poly_order,
                monomial_budget: self.monomial_budget,
                max_degree: self.max_degree,
                refine_depth: self.refine_depth,
            }),
        }
    }
}

/// Intersection of an optional box (infinite bounds allowed) and optional
/// half-spaces `a x <= b`. Nothing given means the whole space.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetConfig {
    #[serde(default)]
    pub lo: Option<Vec<f64>>,
    #[serde(default)]
    pub hi: Option<Vec<f64>>,
    #[serde(default)]
    pub a: Vec<Vec<f64>>,
    #[serde(default)]
    pub b: Vec<f64>,
    /// First and last active step, avoid sets only.
    #[serde(default)]
    pub from: Option<usize>,
    #[serde(default)]
    pub to: Option<usize>,
}

impl SetConfig {
    pub fn polyhedron(&self, n: usize) -> Result<Polyhedron> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rhs = Vec::new();
        for (bounds, sign) in [(&self.lo, -1.0), (&self.hi, 1.0)] {
            let Some(v) = bounds else { continue };
            if v.len() != n {
                return Err(CliError::config(format!("box bound of length {} in dimension {n}", v.len())));
            }
            for (i, &x) in v.iter().enumerate() {
                if x.is_nan() {
                    return Err(CliError::config("NaN box bound"));
                }
                if x.is_finite() {
                    let mut r = vec![0.0; n];
                    r[i] = sign;
                    rows.push(r);
                    rhs.push(sign * x);
                }
            }
        }
        if self.a.len() != self.b.len() {
            return Err(CliError::config("half-space rows `a` and offsets `b` differ in length"));
        }
        for r in &self.a {
            if r.len() != n {
                return Err(CliError::config(format!("half-space row of length {} in dimension {n}", r.len())));
            }
            rows.push(r.clone());
        }
        rhs.extend_from_slice(&self.b);
        if rows.is_empty() {
            return Ok(Polyhedron::whole_space(n));
        }
        Ok(Polyhedron::new(matrix(&rows, "half-space")?, Array1::from(rhs))?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    #[serde(default = "default_max_splits")]
    pub max_splits: usize,
    #[serde(default)]
    pub mode: SplitModeConfig,
    #[serde(default)]
    pub tol_f: Option<f64>,
}

fn default_max_splits() -> usize {
    PartitionOptions::default().max_splits
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self {
            max_splits: default_max_splits(),
            mode: SplitModeConfig::Backward,
            tol_f: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SplitModeConfig {
    #[default]
    Backward,
    Forward,
    Accuracy,
}

impl From<SplitModeConfig> for SplitMode {
    fn from(m: SplitModeConfig) -> Self {
        match m {
            SplitModeConfig::Backward => SplitMode::Backward,
            SplitModeConfig::Forward => SplitMode::Forward,
            SplitModeConfig::Accuracy => SplitMode::Accuracy,
        }
    }
}

impl PartitionConfig {
    pub fn options(&self) -> PartitionOptions {
        PartitionOptions {
            max_splits: self.max_splits,
            mode: self.mode.into(),
            tol_f: self.tol_f,
        }
    }
}

fn matrix(rows: &[Vec<f64>], what: &str) -> Result<Array2<f64>> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::config(format!("ragged {what} matrix")));
    }
    Array2::from_shape_vec((rows.len(), cols), rows.concat()).map_err(|e| CliError::config(e.to_string()))
}

fn affine(cfg: &AffineConfig, what: &str) -> Result<AffineMap> {
    Ok(AffineMap::new(matrix(&cfg.matrix, what)?, Array1::from(cfg.offset.clone()))?)
}

/// A parsed config together with the directory its relative paths refer to.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ProblemConfig,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn from_str(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let config: ProblemConfig = toml::from_str(text)?;
        Ok(Self {
            config,
            base_dir: base_dir.into(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_str(&text, base)
    }

    pub fn network_path(&self) -> PathBuf {
        self.base_dir.join(&self.config.network)
    }

    pub fn load_network(&self) -> Result<Network> {
        load_network(&self.network_path())
    }

    /// Builds and validates the reach-avoid problem around `net`.
    pub fn problem_with(&self, net: Network) -> Result<RAProblem> {
        let c = &self.config;
        if !(c.dt > 0.0 && c.dt.is_finite()) {
            return Err(CliError::config("dt must be positive"));
        }
        let dist = if c.dynamics.disturbance.is_empty() {
            DisturbanceSpec::none()
        } else {
            DisturbanceSpec::new(c.dynamics.disturbance.clone())?
        };
        let plant = Plant::parse(&c.dynamics.equations, &c.params, c.dynamics.inputs, dist)?;
        let n = plant.state_dim();
        let x0 = SZonotope::from_box(&c.initial.lo, &c.initial.hi, &SymbolProvider::new())?;
        let pre = c.controller.pre.as_ref().map(|m| affine(m, "pre")).transpose()?;
        let post = c.controller.post.as_ref().map(|m| affine(m, "post")).transpose()?;
        let controller = Controller::with_maps(pre, net, post)?;
        let mut p = RAProblem::new(x0, controller, plant, c.horizon);
        p.hold = c.hold;
        p.order = c.order;
        p.engine = c.engine.engine();
        p.hold_mode = match c.hold_mode {
            HoldModeConfig::Symbolic => HoldMode::Symbolic,
            HoldModeConfig::Decorrelated => HoldMode::Decorrelated,
        };
        if let Some(g) = &c.goal {
            if g.from.is_some() || g.to.is_some() {
                return Err(CliError::config("the goal applies to the final step only"));
            }
            p.goal = Some(g.polyhedron(n)?);
        }
        for a in &c.avoid {
            let from = a.from.unwrap_or(0);
            let to = a.to.unwrap_or(usize::MAX);
            if from > to {
                return Err(CliError::config(format!("avoid window {from}..{to} is empty")));
            }
            p.avoid.push(TimedSet {
                from,
                to,
                set: a.polyhedron(n)?,
            });
        }
        p.validate()?;
        Ok(p)
    }

    pub fn problem(&self) -> Result<RAProblem> {
        self.problem_with(self.load_network()?)
    }
}
