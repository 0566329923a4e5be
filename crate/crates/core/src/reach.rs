//! Closed-loop reach-avoid verification over a finite horizon.
//!
//! The controller set is recomputed every `hold` plant steps and reused in
//! between. Reuse keeps the very same symbols, so contributions of a held
//! input cancel across steps where the dynamics allow it.

use ndarray::{Array1, Array2};

use crate::error::{check_dim, Error, Result};
use crate::nn::{propagate_affine, propagate_poly, Network, PolyOptions};
use crate::plant::Plant;
use crate::spoly::SPolynotope;
use crate::symbols::{SymbolId, SymbolProvider};
use crate::szono::{Interval, Polyhedron, SZonotope};

/// `y = A x + a`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    matrix: Array2<f64>,
    offset: Array1<f64>,
}

impl AffineMap {
    pub fn new(matrix: Array2<f64>, offset: Array1<f64>) -> Result<Self> {
        check_dim("affine map offset", matrix.nrows(), offset.len())?;
        if matrix.iter().chain(offset.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("affine map"));
        }
        Ok(Self { matrix, offset })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: Array2::eye(n),
            offset: Array1::zeros(n),
        }
    }

    pub fn offset_only(offset: Array1<f64>) -> Self {
        Self {
            matrix: Array2::eye(offset.len()),
            offset,
        }
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn offset(&self) -> &Array1<f64> {
        &self.offset
    }

    pub fn input_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, x: &Array1<f64>) -> Array1<f64> {
        self.matrix.dot(x) + &self.offset
    }

    pub fn apply_szono(&self, x: &SZonotope) -> Result<SZonotope> {
        x.linear_image(&self.matrix)?.translate(&self.offset)
    }

    pub fn apply_spoly(&self, x: &SPolynotope) -> Result<SPolynotope> {
        x.linear_image(&self.matrix)?.translate(&self.offset)
    }
}

/// `u = post(g(pre(x)))` for a network `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct Controller {
    pub pre: Option<AffineMap>,
    pub net: Network,
    pub post: Option<AffineMap>,
}

impl Controller {
    pub fn new(net: Network) -> Self {
        Self {
            pre: None,
            net,
            post: None,
        }
    }

    pub fn with_maps(pre: Option<AffineMap>, net: Network, post: Option<AffineMap>) -> Result<Self> {
        if let Some(m) = &pre {
            check_dim("controller input map", net.input_dim(), m.output_dim())?;
        }
        if let Some(m) = &post {
            check_dim("controller output map", net.output_dim(), m.input_dim())?;
        }
        Ok(Self { pre, net, post })
    }

    pub fn input_dim(&self) -> usize {
        self.pre
            .as_ref()
            .map_or(self.net.input_dim(), AffineMap::input_dim)
    }

    pub fn output_dim(&self) -> usize {
        self.post
            .as_ref()
            .map_or(self.net.output_dim(), AffineMap::output_dim)
    }

    pub fn eval(&self, x: &Array1<f64>) -> Array1<f64> {
        let z = self.pre.as_ref().map_or_else(|| x.clone(), |m| m.apply(x));
        let y = self.net.eval(&z);
        self.post.as_ref().map_or(y.clone(), |m| m.apply(&y))
    }

    pub fn abstract_szono(&self, x: &SZonotope, provider: &SymbolProvider) -> Result<SZonotope> {
        let z = match &self.pre {
            Some(m) => m.apply_szono(x)?,
            None => x.clone(),
        };
        let y = propagate_affine(&z, &self.net, provider)?;
        match &self.post {
            Some(m) => m.apply_szono(&y),
            None => Ok(y),
        }
    }

    pub fn abstract_spoly(
        &self,
        x: &SPolynotope,
        opts: &PolyOptions,
        provider: &SymbolProvider,
    ) -> Result<SPolynotope> {
        let z = match &self.pre {
            Some(m) => m.apply_spoly(x)?,
            None => x.clone(),
        };
        let y = propagate_poly(&z, &self.net, opts, provider)?;
        match &self.post {
            Some(m) => m.apply_spoly(&y),
            None => Ok(y),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Engine {
    Affine,
    Poly(PolyOptions),
}

/// How a held controller set is reused on later plant steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HoldMode {
    /// Same symbols at every reuse.
    #[default]
    Symbolic,
    /// Replaced by its interval hull on fresh symbols at every use, as a
    /// classical set-valued evaluation would do.
    Decorrelated,
}

/// Avoid set active on steps `from..=to`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedSet {
    pub from: usize,
    pub to: usize,
    pub set: Polyhedron,
}

impl TimedSet {
    pub fn always(set: Polyhedron) -> Self {
        Self {
            from: 0,
            to: usize::MAX,
            set,
        }
    }

    pub fn active_at(&self, step: usize) -> bool {
        self.from <= step && step <= self.to
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RAProblem {
    pub x0: SZonotope,
    pub controller: Controller,
    pub plant: Plant,
    /// `None` means the whole state space.
    pub goal: Option<Polyhedron>,
    pub avoid: Vec<TimedSet>,
    pub horizon: usize,
    pub order: usize,
    /// Plant steps per controller update.
    pub hold: usize,
    pub engine: Engine,
    pub hold_mode: HoldMode,
    /// Never reduce away the symbols of `x0` (needed by partitioning).
    pub protect_initial: bool,
}

impl RAProblem {
    pub fn new(x0: SZonotope, controller: Controller, plant: Plant, horizon: usize) -> Self {
        Self {
            x0,
            controller,
            plant,
            goal: None,
            avoid: Vec::new(),
            horizon,
            order: 100,
            hold: 1,
            engine: Engine::Affine,
            hold_mode: HoldMode::Symbolic,
            protect_initial: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.plant.state_dim();
        check_dim("initial set", n, self.x0.dim())?;
        check_dim("controller input", n, self.controller.input_dim())?;
        check_dim("controller output", self.plant.input_dim(), self.controller.output_dim())?;
        if let Some(g) = &self.goal {
            check_dim("goal set", n, g.dim())?;
        }
        for a in &self.avoid {
            check_dim("avoid set", n, a.set.dim())?;
        }
        if self.horizon == 0 {
            return Err(Error::Problem("horizon must be at least 1".into()));
        }
        if self.hold == 0 {
            return Err(Error::Problem("hold must be at least 1".into()));
        }
        let protected = if self.protect_initial { self.x0.num_symbols() } else { 0 };
        if self.order < n + protected {
            return Err(Error::ReductionOrder {
                order: self.order,
                required: n + protected,
            });
        }
        Ok(())
    }
}

/// A reachable-set bound as produced by either engine.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceSet {
    Zono(SZonotope),
    Poly(SPolynotope),
}

impl TraceSet {
    pub fn dim(&self) -> usize {
        match self {
            Self::Zono(z) => z.dim(),
            Self::Poly(p) => p.dim(),
        }
    }

    pub fn ids(&self) -> Vec<SymbolId> {
        match self {
            Self::Zono(z) => z.ids().to_vec(),
            Self::Poly(p) => p.ids(),
        }
    }

    pub fn interval_hull(&self) -> Vec<Interval> {
        match self {
            Self::Zono(z) => z.interval_hull(),
            Self::Poly(p) => p.interval_hull(),
        }
    }

    pub fn as_szonotope(&self) -> Option<&SZonotope> {
        match self {
            Self::Zono(z) => Some(z),
            Self::Poly(_) => None,
        }
    }

    /// An s-zonotope enclosure; non-linear monomials go to fresh symbols.
    pub fn enclosure(&self, provider: &SymbolProvider) -> SZonotope {
        match self {
            Self::Zono(z) => z.clone(),
            Self::Poly(p) => p
                .reduce_monomials(usize::MAX, 1, provider)
                .to_szonotope()
                .expect("degree-one polynotope"),
        }
    }

    /// Bounds of `hᵀx` for each row of `h`.
    fn projections(&self, h: &Array2<f64>, depth: usize) -> Result<Vec<Interval>> {
        (0..h.nrows())
            .map(|j| {
                let row = h.row(j).to_owned();
                match self {
                    Self::Zono(z) => {
                        let hi = z.support(row.view())?;
                        let lo = -z.support((-&row).view())?;
                        Ok(Interval { lo, hi })
                    }
                    Self::Poly(p) => p
                        .linear_image(&row.insert_axis(ndarray::Axis(0)))?
                        .refine_bound(depth),
                }
            })
            .collect()
    }

    pub fn disjoint_from(&self, a: &Polyhedron, depth: usize) -> Result<bool> {
        let b = self.projections(&a.normals().to_owned(), depth)?;
        Ok(b.iter().zip(a.offsets()).any(|(i, r)| i.lo > *r))
    }

    pub fn contained_in(&self, g: &Polyhedron, depth: usize) -> Result<bool> {
        let b = self.projections(&g.normals().to_owned(), depth)?;
        Ok(b.iter().zip(g.offsets()).all(|(i, r)| i.hi <= *r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Avoid,
    Goal,
}

/// A constraint that could not be shown to hold at `step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub step: usize,
    pub kind: ViolationKind,
    /// Every trajectory violates it: the set lies inside the avoid set, or
    /// misses the goal entirely.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReachResult {
    /// First violation, if any.
    pub violation: Option<Violation>,
    /// Bounding sets `X(0), …, X(t)` up to the last computed step.
    pub trace: Vec<TraceSet>,
}

impl ReachResult {
    pub fn is_ra_ok(&self) -> bool {
        self.violation.is_none()
    }

    pub fn t_err(&self) -> Option<usize> {
        self.violation.map(|v| v.step)
    }

    pub fn hulls(&self) -> Vec<Vec<Interval>> {
        self.trace.iter().map(TraceSet::interval_hull).collect()
    }
}

/// Outcome of a run that does not stop at the first violation.
#[derive(Debug, Clone, PartialEq)]
pub struct LastError {
    /// Latest violated step, `None` when every check passed.
    pub t_last: Option<usize>,
    pub violations: Vec<Violation>,
    /// Set at `t_last`, or the final set when nothing was violated.
    pub witness: TraceSet,
    pub trace: Vec<TraceSet>,
}

struct Run<'a> {
    p: &'a RAProblem,
    provider: SymbolProvider,
    depth: usize,
}

enum Mode {
    FirstError,
    AllErrors { cap: usize },
}

impl<'a> Run<'a> {
    fn new(p: &'a RAProblem) -> Self {
        let depth = match p.engine {
            Engine::Affine => 0,
            Engine::Poly(o) => o.refine_depth,
        };
        Self {
            p,
            provider: SymbolProvider::after(p.x0.ids()),
            depth,
        }
    }

    fn check_avoid(&self, x: &TraceSet, step: usize) -> Result<Option<Violation>> {
        for a in self.p.avoid.iter().filter(|a| a.active_at(step)) {
            if !x.disjoint_from(&a.set, self.depth)? {
                return Ok(Some(Violation {
                    step,
                    kind: ViolationKind::Avoid,
                    certified: x.contained_in(&a.set, self.depth)?,
                }));
            }
        }
        Ok(None)
    }

    fn check_goal(&self, x: &TraceSet, step: usize) -> Result<Option<Violation>> {
        let Some(g) = &self.p.goal else {
            return Ok(None);
        };
        if x.contained_in(g, self.depth)? {
            return Ok(None);
        }
        Ok(Some(Violation {
            step,
            kind: ViolationKind::Goal,
            certified: x.disjoint_from(g, self.depth)?,
        }))
    }

    fn control(&self, x: &TraceSet) -> Result<TraceSet> {
        match (x, self.p.engine) {
            (TraceSet::Zono(z), _) => Ok(TraceSet::Zono(
                self.p.controller.abstract_szono(z, &self.provider)?,
            )),
            (TraceSet::Poly(q), Engine::Poly(o)) => Ok(TraceSet::Poly(
                self.p.controller.abstract_spoly(q, &o, &self.provider)?,
            )),
            (TraceSet::Poly(_), Engine::Affine) => unreachable!("engine fixed per run"),
        }
    }

    fn reuse(&self, u: &TraceSet) -> TraceSet {
        match (self.p.hold_mode, u) {
            (HoldMode::Symbolic, u) => u.clone(),
            (HoldMode::Decorrelated, TraceSet::Zono(z)) => {
                TraceSet::Zono(z.decorrelate(&self.provider))
            }
            (HoldMode::Decorrelated, TraceSet::Poly(_)) => TraceSet::Poly(
                SPolynotope::from_szonotope(&u.enclosure(&self.provider).decorrelate(&self.provider)),
            ),
        }
    }

    fn step(&self, x: &TraceSet, u: &TraceSet) -> Result<TraceSet> {
        let initial: &[SymbolId] = if self.p.protect_initial { self.p.x0.ids() } else { &[] };
        match (x, u, self.p.engine) {
            (TraceSet::Zono(x), TraceSet::Zono(u), _) => {
                let out = self.p.plant.step_szono(x, u, &self.provider)?;
                let mut protected = out.disturbance_ids;
                protected.extend_from_slice(initial);
                Ok(TraceSet::Zono(out.next.reduce(self.p.order, &protected, &self.provider)?))
            }
            (TraceSet::Poly(x), TraceSet::Poly(u), Engine::Poly(o)) => {
                let out = self.p.plant.step_spoly(x, u, o.refine_depth, &self.provider)?;
                Ok(TraceSet::Poly(out.next.reduce_monomials(
                    o.monomial_budget,
                    o.max_degree,
                    &self.provider,
                )))
            }
            _ => unreachable!("engine fixed per run"),
        }
    }

    fn initial(&self) -> TraceSet {
        match self.p.engine {
            Engine::Affine => TraceSet::Zono(self.p.x0.clone()),
            Engine::Poly(_) => TraceSet::Poly(SPolynotope::from_szonotope(&self.p.x0)),
        }
    }

    fn go(&self, mode: Mode) -> Result<(Vec<Violation>, Vec<TraceSet>)> {
        let last = match mode {
            Mode::FirstError => self.p.horizon,
            Mode::AllErrors { cap } => cap.min(self.p.horizon),
        };
        let stop_early = matches!(mode, Mode::FirstError);
        let mut x = self.initial();
        let mut trace = vec![x.clone()];
        let mut violations = Vec::new();
        let mut held: Option<TraceSet> = None;
        for i in 0..last {
            let v = self.check_avoid(&x, i).map_err(|e| e.at_step(i))?;
            if let Some(v) = v {
                violations.push(v);
                if stop_early {
                    return Ok((violations, trace));
                }
            }
            let u = match (&held, i % self.p.hold) {
                (Some(u), k) if k != 0 => self.reuse(u),
                _ => {
                    let u = self.control(&x).map_err(|e| e.at_step(i))?;
                    held = Some(u.clone());
                    if self.p.hold_mode == HoldMode::Decorrelated {
                        self.reuse(&u)
                    } else {
                        u
                    }
                }
            };
            x = self.step(&x, &u).map_err(|e| e.at_step(i))?;
            trace.push(x.clone());
        }
        if last == self.p.horizon {
            if let Some(v) = self.check_goal(&x, last).map_err(|e| e.at_step(last))? {
                violations.push(v);
            }
        }
        Ok((violations, trace))
    }
}

/// Finite-horizon reach-avoid check, stopping at the first step where a
/// constraint cannot be shown to hold.
pub fn verify(p: &RAProblem) -> Result<ReachResult> {
    p.validate()?;
    let (violations, trace) = Run::new(p).go(Mode::FirstError)?;
    Ok(ReachResult {
        violation: violations.first().copied(),
        trace,
    })
}

/// Runs up to `min(cap, horizon)` steps without stopping and reports the
/// latest violated step. The goal is only checked when the full horizon is
/// reached.
pub fn verify_last_error(p: &RAProblem, cap: usize) -> Result<LastError> {
    p.validate()?;
    let (violations, trace) = Run::new(p).go(Mode::AllErrors { cap })?;
    let t_last = violations.iter().map(|v| v.step).max();
    let witness = trace[t_last.unwrap_or(trace.len() - 1)].clone();
    Ok(LastError {
        t_last,
        violations,
        witness,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{ActivationKind, Layer};
    use crate::plant::DisturbanceSpec;
    use ndarray::array;
    use std::collections::HashMap;

    /// Controller whose abstraction on [-1, 1] is `0.5 e1 + 0.5 e2`.
    fn toy_controller() -> Controller {
        let hidden = Layer::new(array![[1.0], [-1.0]], array![0.0, 0.0], ActivationKind::Relu).unwrap();
        let out = Layer::new(array![[2.0, 2.0]], array![-1.0], ActivationKind::Linear).unwrap();
        Controller::new(Network::new(vec![hidden, out]).unwrap())
    }

    fn toy_problem() -> RAProblem {
        let plant = Plant::parse(&["-x1 + u1"], &HashMap::new(), 1, DisturbanceSpec::none()).unwrap();
        let x0 = SZonotope::symbol(SymbolId(1));
        let mut p = RAProblem::new(x0, toy_controller(), plant, 2);
        p.hold = 2;
        p.goal = Some(Polyhedron::from_box(&[-1.0], &[1.0]).unwrap());
        p
    }

    #[test]
    fn held_input_cancels() {
        let r = verify(&toy_problem()).unwrap();
        assert!(r.is_ra_ok());
        let hulls = r.hulls();
        assert_eq!(hulls[1][0], Interval { lo: -2.0, hi: 2.0 });
        assert_eq!(hulls[2][0], Interval { lo: -1.0, hi: 1.0 });
    }

    #[test]
    fn decorrelated_hold_loses_dependency() {
        let mut p = toy_problem();
        p.hold_mode = HoldMode::Decorrelated;
        let r = verify(&p).unwrap();
        assert_eq!(r.hulls()[2][0], Interval { lo: -3.0, hi: 3.0 });
        assert_eq!(
            r.violation,
            Some(Violation {
                step: 2,
                kind: ViolationKind::Goal,
                certified: false
            })
        );
    }

    #[test]
    fn whole_space_goal_always_holds() {
        let mut p = toy_problem();
        p.goal = None;
        p.hold_mode = HoldMode::Decorrelated;
        assert!(verify(&p).unwrap().is_ra_ok());
    }

    #[test]
    fn avoid_covering_initial_set() {
        let mut p = toy_problem();
        p.avoid = vec![TimedSet::always(Polyhedron::from_box(&[-5.0], &[5.0]).unwrap())];
        let r = verify(&p).unwrap();
        assert_eq!(r.t_err(), Some(0));
        assert!(r.violation.unwrap().certified);
        assert_eq!(r.trace.len(), 1);
    }

    fn counter_problem() -> RAProblem {
        // x⁺ = x + 1 with a zero controller: x(t) = t + [-0.1, 0.1]
        let plant = Plant::parse(&["x1 + 1 + 0*u1"], &HashMap::new(), 1, DisturbanceSpec::none()).unwrap();
        let zero = Layer::new(array![[0.0]], array![0.0], ActivationKind::Linear).unwrap();
        let ctrl = Controller::new(Network::new(vec![zero]).unwrap());
        let x0 = SZonotope::new(array![0.0], array![[0.1]], vec![SymbolId(1)]).unwrap();
        RAProblem::new(x0, ctrl, plant, 6)
    }

    #[test]
    fn last_error_picks_latest_violation() {
        let mut p = counter_problem();
        let at = |t: f64| Polyhedron::from_box(&[t - 0.5], &[t + 0.5]).unwrap();
        p.avoid = vec![
            TimedSet { from: 2, to: 2, set: at(2.0) },
            TimedSet { from: 5, to: 5, set: at(5.0) },
        ];
        let r = verify_last_error(&p, usize::MAX).unwrap();
        assert_eq!(r.t_last, Some(5));
        assert_eq!(r.violations.len(), 2);
        assert_eq!(r.witness.interval_hull()[0].mid(), 5.0);
        assert_eq!(verify(&p).unwrap().t_err(), Some(2));
        assert_eq!(verify_last_error(&p, 3).unwrap().t_last, Some(2));
    }

    #[test]
    fn last_error_cases() {
        let mut p = counter_problem();
        assert_eq!(verify_last_error(&p, usize::MAX).unwrap().t_last, None);
        p.goal = Some(Polyhedron::from_box(&[10.0], &[11.0]).unwrap());
        let r = verify_last_error(&p, usize::MAX).unwrap();
        assert_eq!(r.t_last, Some(6));
        assert!(r.violations[0].certified);
    }

    #[test]
    fn protected_initial_symbols_survive() {
        let mut p = counter_problem();
        p.plant = Plant::parse(&["0.5*x1 + 0.1*sin(x1) + 0.05*w1 + u1"], &HashMap::new(), 1, DisturbanceSpec::unit(1)).unwrap();
        p.order = 3;
        p.protect_initial = true;
        let r = verify(&p).unwrap();
        for x in &r.trace {
            let z = x.as_szonotope().unwrap();
            assert!(z.num_symbols() <= 3);
            assert!(z.ids().contains(&SymbolId(1)));
        }
    }

    #[test]
    fn validation_errors() {
        let mut p = toy_problem();
        p.horizon = 0;
        assert!(verify(&p).is_err());
        let mut p = toy_problem();
        p.goal = Some(Polyhedron::from_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap());
        assert!(matches!(verify(&p), Err(Error::DimensionMismatch { .. })));
        let mut p = toy_problem();
        p.order = 0;
        assert!(matches!(verify(&p), Err(Error::ReductionOrder { .. })));
    }

    #[test]
    fn step_errors_carry_the_step() {
        let mut p = counter_problem();
        p.plant = Plant::parse(&["1/(x1 - 2) + 0*u1"], &HashMap::new(), 1, DisturbanceSpec::none()).unwrap();
        p.x0 = SZonotope::new(array![0.0], array![[0.1]], vec![SymbolId(1)]).unwrap();
        // x(1) = 1/(x0 - 2) ≈ -0.5, x(2) = 1/(x(1) - 2) fine; an x0 near 2 fails at once
        assert!(verify(&p).is_ok());
        p.x0 = SZonotope::new(array![2.0], array![[0.1]], vec![SymbolId(1)]).unwrap();
        assert!(matches!(verify(&p), Err(Error::AtStep { step: 0, .. })));
    }

    #[test]
    fn poly_engine_runs_the_toy() {
        let mut p = toy_problem();
        p.engine = Engine::Poly(PolyOptions::default());
        let r = verify(&p).unwrap();
        assert!(r.is_ra_ok());
        let h = &r.hulls()[2][0];
        assert!(h.lo <= -1.0 && h.hi >= 1.0 && h.hi <= 1.0 + 1e-12);
    }
}
