//! Discrete-time plant models `x⁺ = f(x, u, w)` as expression trees, and
//! their inclusion-preserving evaluation over symbolic sets.

use std::cell::OnceCell;
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::nn::{sigmoid, AffineTriplet, DEGENERATE_WIDTH};
use crate::spoly::SPolynotope;
use crate::symbols::{SymbolId, SymbolProvider};
use crate::szono::{Interval, SZonotope};

/// Univariate functions with closed-form solutions of `h'(x) = α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Primitive {
    Sin,
    Cos,
    Tanh,
    Sigmoid,
    Exp,
    Square,
    Identity,
    /// `1/x`, defined on intervals that do not contain 0.
    Recip,
}

impl Primitive {
    pub const ALL: [Primitive; 8] = [
        Self::Sin,
        Self::Cos,
        Self::Tanh,
        Self::Sigmoid,
        Self::Exp,
        Self::Square,
        Self::Identity,
        Self::Recip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Tanh => "tanh",
            Self::Sigmoid => "sigmoid",
            Self::Exp => "exp",
            Self::Square => "square",
            Self::Identity => "identity",
            Self::Recip => "recip",
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Self::Sin => x.sin(),
            Self::Cos => x.cos(),
            Self::Tanh => x.tanh(),
            Self::Sigmoid => sigmoid(x),
            Self::Exp => x.exp(),
            Self::Square => x * x,
            Self::Identity => x,
            Self::Recip => 1.0 / x,
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Self::Sin => x.cos(),
            Self::Cos => -x.sin(),
            Self::Tanh => 1.0 - x.tanh().powi(2),
            Self::Sigmoid => {
                let v = sigmoid(x);
                v * (1.0 - v)
            }
            Self::Exp => x.exp(),
            Self::Square => 2.0 * x,
            Self::Identity => 1.0,
            Self::Recip => -1.0 / (x * x),
        }
    }

    fn check_domain(self, l: f64, u: f64) -> Result<()> {
        let bad = match self {
            Self::Recip => l <= 0.0 && u >= 0.0,
            _ => false,
        };
        if bad {
            Err(Error::OutsideDomain {
                name: self.name().into(),
                lo: l,
                hi: u,
            })
        } else {
            Ok(())
        }
    }

    /// Every solution of `h'(x) = α` in `[l, u]`.
    pub fn stationary_points(self, alpha: f64, l: f64, u: f64) -> Vec<f64> {
        let mut pts = Vec::new();
        match self {
            Self::Sin => {
                if alpha.abs() <= 1.0 {
                    let a = alpha.acos();
                    periodic(&[a, -a], l, u, &mut pts);
                }
            }
            Self::Cos => {
                if alpha.abs() <= 1.0 {
                    let b = (-alpha).asin();
                    periodic(&[b, PI - b], l, u, &mut pts);
                }
            }
            Self::Tanh => {
                if alpha > 0.0 && alpha <= 1.0 {
                    let x = (1.0 - alpha).sqrt().atanh();
                    pts.extend([x, -x]);
                }
            }
            Self::Sigmoid => {
                if alpha > 0.0 && alpha <= 0.25 {
                    let d = (1.0 - 4.0 * alpha).max(0.0).sqrt();
                    for v in [(1.0 - d) / 2.0, (1.0 + d) / 2.0] {
                        pts.push((v / (1.0 - v)).ln());
                    }
                }
            }
            Self::Exp => {
                if alpha > 0.0 {
                    pts.push(alpha.ln());
                }
            }
            Self::Square => pts.push(alpha / 2.0),
            Self::Identity => {}
            Self::Recip => {
                if alpha < 0.0 {
                    let x = (-1.0 / alpha).sqrt();
                    pts.extend([x, -x]);
                }
            }
        }
        pts.retain(|x| x.is_finite() && *x >= l && *x <= u);
        pts.sort_by(f64::total_cmp);
        pts
    }
}

fn periodic(bases: &[f64], l: f64, u: f64, out: &mut Vec<f64>) {
    for &b in bases {
        let k0 = ((l - b) / TAU).floor() as i64;
        let k1 = ((u - b) / TAU).ceil() as i64;
        for k in k0..=k1 {
            out.push(b + TAU * k as f64);
        }
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Primitive {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse {
                pos: 0,
                msg: format!("unknown function `{s}`"),
            })
    }
}

/// Secant-slope sandwich of `h` on `[l, u]`.
///
/// The extreme deviations from the secant are searched among the end points
/// and the stationary points, which the primitive enumerates exhaustively.
pub fn univariate_triplet(prim: Primitive, l: f64, u: f64) -> Result<AffineTriplet> {
    if !(l.is_finite() && u.is_finite()) {
        return Err(Error::NonFinite("univariate bounds"));
    }
    if l > u {
        return Err(Error::InvalidInterval { lo: l, hi: u });
    }
    prim.check_domain(l, u)?;
    let (hl, hu) = (prim.eval(l), prim.eval(u));
    if !(hl.is_finite() && hu.is_finite()) {
        return Err(Error::NonFinite("univariate evaluation"));
    }
    if u - l < DEGENERATE_WIDTH {
        let slope = prim.derivative(l).abs().max(prim.derivative(u).abs());
        return Ok(AffineTriplet {
            alpha: 0.0,
            beta: 0.5 * (hl + hu),
            gamma: 0.5 * (hu - hl).abs() + slope * (u - l),
        });
    }
    let alpha = (hu - hl) / (u - l);
    // deviation from the secant; zero at both ends
    let xi = |x: f64| prim.eval(x) - hl - alpha * (x - l);
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for x in prim.stationary_points(alpha, l, u) {
        let v = xi(x);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok(AffineTriplet {
        alpha,
        beta: hl - alpha * l + 0.5 * (hi + lo),
        gamma: 0.5 * (hi - lo),
    })
}

/// `h(Z) ⊆ αZ + β + γ s_fresh` with bounds of `Z` from its 1-norm.
pub fn abstract_univariate(
    prim: Primitive,
    z: &SZonotope,
    provider: &SymbolProvider,
) -> Result<SZonotope> {
    let b = z.bounds_1d()?;
    let t = univariate_triplet(prim, b.lo, b.hi)?;
    let err = SZonotope::symbol(provider.fresh()).scale(t.gamma);
    z.scale(t.alpha).shift(t.beta).add(&err)
}

/// Polynotope counterpart of [`abstract_univariate`], bounding `P` by
/// bisection to `refine_depth`.
pub fn abstract_univariate_poly(
    prim: Primitive,
    p: &SPolynotope,
    refine_depth: usize,
    provider: &SymbolProvider,
) -> Result<SPolynotope> {
    let b = p.refine_bound(refine_depth)?;
    let t = univariate_triplet(prim, b.lo, b.hi)?;
    let err = SPolynotope::symbol(provider.fresh()).scale(t.gamma);
    p.scale(t.alpha).shift(t.beta).add(&err)
}

/// Scalar update expression over states `x`, inputs `u` and disturbances `w`
/// (0-based indices).
#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsExpr {
    State(usize),
    Input(usize),
    Disturbance(usize),
    Const(f64),
    Add(Box<DynamicsExpr>, Box<DynamicsExpr>),
    Sub(Box<DynamicsExpr>, Box<DynamicsExpr>),
    Scale(f64, Box<DynamicsExpr>),
    Mul(Box<DynamicsExpr>, Box<DynamicsExpr>),
    Univariate(Primitive, Box<DynamicsExpr>),
}

/// Lazily built disturbance set shared by all equations of one step.
struct StepContext<'a, T> {
    x: &'a T,
    u: &'a T,
    amplitudes: &'a [f64],
    w: OnceCell<(T, Vec<SymbolId>)>,
    provider: &'a SymbolProvider,
}

impl<'a, T> StepContext<'a, T> {
    fn new(x: &'a T, u: &'a T, amplitudes: &'a [f64], provider: &'a SymbolProvider) -> Self {
        Self {
            x,
            u,
            amplitudes,
            w: OnceCell::new(),
            provider,
        }
    }

    fn disturbance_ids(&self) -> Vec<SymbolId> {
        self.w.get().map(|(_, ids)| ids.clone()).unwrap_or_default()
    }
}

impl StepContext<'_, SZonotope> {
    fn w(&self) -> &SZonotope {
        &self
            .w
            .get_or_init(|| {
                let w = disturbance_set(self.amplitudes, self.provider);
                let ids = w.ids().to_vec();
                (w, ids)
            })
            .0
    }
}

impl StepContext<'_, SPolynotope> {
    fn w(&self) -> &SPolynotope {
        &self
            .w
            .get_or_init(|| {
                let w = disturbance_set(self.amplitudes, self.provider);
                let ids = w.ids().to_vec();
                (SPolynotope::from_szonotope(&w), ids)
            })
            .0
    }
}

fn is_point(z: &SZonotope) -> bool {
    z.generators().iter().all(|&v| v == 0.0)
}

fn check_index(kind: &str, i: usize, n: usize) -> Result<()> {
    if i < n {
        Ok(())
    } else {
        Err(Error::Problem(format!(
            "{kind}{} used but only {n} declared",
            i + 1
        )))
    }
}

impl DynamicsExpr {
    pub fn parse(src: &str, params: &HashMap<String, f64>) -> Result<Self> {
        Parser::new(src, params).parse()
    }

    /// Largest `(state, input, disturbance)` index used, plus one.
    pub fn arity(&self) -> (usize, usize, usize) {
        use DynamicsExpr::*;
        match self {
            State(i) => (i + 1, 0, 0),
            Input(i) => (0, i + 1, 0),
            Disturbance(i) => (0, 0, i + 1),
            Const(_) => (0, 0, 0),
            Scale(_, e) | Univariate(_, e) => e.arity(),
            Add(a, b) | Sub(a, b) | Mul(a, b) => {
                let (p, q) = (a.arity(), b.arity());
                (p.0.max(q.0), p.1.max(q.1), p.2.max(q.2))
            }
        }
    }

    /// Concrete value; `w` holds actual disturbance values, not unit ones.
    pub fn eval(&self, x: &[f64], u: &[f64], w: &[f64]) -> f64 {
        use DynamicsExpr::*;
        match self {
            State(i) => x[*i],
            Input(i) => u[*i],
            Disturbance(i) => w[*i],
            Const(c) => *c,
            Add(a, b) => a.eval(x, u, w) + b.eval(x, u, w),
            Sub(a, b) => a.eval(x, u, w) - b.eval(x, u, w),
            Scale(c, e) => c * e.eval(x, u, w),
            Mul(a, b) => a.eval(x, u, w) * b.eval(x, u, w),
            Univariate(p, e) => p.eval(e.eval(x, u, w)),
        }
    }

    fn eval_szono_in(&self, cx: &StepContext<'_, SZonotope>) -> Result<SZonotope> {
        use DynamicsExpr::*;
        match self {
            State(i) => Ok(cx.x.row(*i)),
            Input(i) => Ok(cx.u.row(*i)),
            Disturbance(i) => Ok(cx.w().row(*i)),
            Const(c) => Ok(SZonotope::scalar(*c)),
            Add(a, b) => a.eval_szono_in(cx)?.add(&b.eval_szono_in(cx)?),
            Sub(a, b) => a.eval_szono_in(cx)?.sub(&b.eval_szono_in(cx)?),
            Scale(c, e) => Ok(e.eval_szono_in(cx)?.scale(*c)),
            Mul(a, b) => {
                let (p, q) = (a.eval_szono_in(cx)?, b.eval_szono_in(cx)?);
                if is_point(&q) {
                    Ok(p.scale(q.center()[0]))
                } else if is_point(&p) {
                    Ok(q.scale(p.center()[0]))
                } else {
                    p.multiply(&q, cx.provider)
                }
            }
            Univariate(prim, e) => abstract_univariate(*prim, &e.eval_szono_in(cx)?, cx.provider),
        }
    }

    fn eval_spoly_in(&self, cx: &StepContext<'_, SPolynotope>, depth: usize) -> Result<SPolynotope> {
        use DynamicsExpr::*;
        match self {
            State(i) => Ok(cx.x.row(*i)),
            Input(i) => Ok(cx.u.row(*i)),
            Disturbance(i) => Ok(cx.w().row(*i)),
            Const(c) => Ok(SPolynotope::scalar(*c)),
            Add(a, b) => a.eval_spoly_in(cx, depth)?.add(&b.eval_spoly_in(cx, depth)?),
            Sub(a, b) => a.eval_spoly_in(cx, depth)?.sub(&b.eval_spoly_in(cx, depth)?),
            Scale(c, e) => Ok(e.eval_spoly_in(cx, depth)?.scale(*c)),
            Mul(a, b) => a.eval_spoly_in(cx, depth)?.multiply(&b.eval_spoly_in(cx, depth)?),
            Univariate(Primitive::Identity, e) => e.eval_spoly_in(cx, depth),
            Univariate(Primitive::Square, e) => e.eval_spoly_in(cx, depth)?.pow(2),
            Univariate(prim, e) => {
                abstract_univariate_poly(*prim, &e.eval_spoly_in(cx, depth)?, depth, cx.provider)
            }
        }
    }

    fn fold(self) -> Self {
        use DynamicsExpr::*;
        match self {
            Add(a, b) => match (*a, *b) {
                (Const(p), Const(q)) => Const(p + q),
                (Const(0.0), e) | (e, Const(0.0)) => e,
                (a, b) => Add(Box::new(a), Box::new(b)),
            },
            Sub(a, b) => match (*a, *b) {
                (Const(p), Const(q)) => Const(p - q),
                (e, Const(0.0)) => e,
                (Const(0.0), e) => Scale(-1.0, Box::new(e)).fold(),
                (a, b) => Sub(Box::new(a), Box::new(b)),
            },
            Mul(a, b) => match (*a, *b) {
                (Const(p), Const(q)) => Const(p * q),
                (Const(c), e) | (e, Const(c)) => Scale(c, Box::new(e)).fold(),
                (a, b) => Mul(Box::new(a), Box::new(b)),
            },
            Scale(c, e) => match *e {
                Const(v) => Const(c * v),
                _ if c == 1.0 => *e,
                Scale(d, inner) => Scale(c * d, inner),
                e => Scale(c, Box::new(e)),
            },
            Univariate(p, e) => match *e {
                Const(v) => Const(p.eval(v)),
                e => Univariate(p, Box::new(e)),
            },
            e => e,
        }
    }
}

/// `⟨0, diag(amp), fresh⟩`, one symbol per component.
pub fn disturbance_set(amplitudes: &[f64], provider: &SymbolProvider) -> SZonotope {
    let n = amplitudes.len();
    let ids = provider.fresh_ids(n);
    SZonotope::from_parts(
        Array1::zeros(n),
        Array2::from_diag(&Array1::from(amplitudes.to_vec())),
        ids,
    )
}

/// Bounds `w ∈ [-amp, amp]` per component.
#[derive(Debug, Clone, PartialEq)]
pub struct DisturbanceSpec {
    amplitudes: Vec<f64>,
}

impl DisturbanceSpec {
    pub fn new(amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::Problem(
                "disturbance amplitudes must be finite and non-negative".into(),
            ));
        }
        Ok(Self { amplitudes })
    }

    pub fn none() -> Self {
        Self {
            amplitudes: Vec::new(),
        }
    }

    pub fn unit(n: usize) -> Self {
        Self {
            amplitudes: vec![1.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn bounds(&self) -> Vec<Interval> {
        self.amplitudes
            .iter()
            .map(|&a| Interval::centered(0.0, a))
            .collect()
    }
}

/// One update expression per state component.
#[derive(Debug, Clone, PartialEq)]
pub struct Plant {
    equations: Vec<DynamicsExpr>,
    n_u: usize,
    disturbance: DisturbanceSpec,
}

/// Successor set plus the disturbance symbols created for this step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput<T> {
    pub next: T,
    pub disturbance_ids: Vec<SymbolId>,
}

impl Plant {
    pub fn new(equations: Vec<DynamicsExpr>, n_u: usize, disturbance: DisturbanceSpec) -> Result<Self> {
        let n_x = equations.len();
        if n_x == 0 {
            return Err(Error::Problem("a plant needs at least one state".into()));
        }
        for e in &equations {
            let (a, b, c) = e.arity();
            if a > 0 {
                check_index("x", a - 1, n_x)?;
            }
            if b > 0 {
                check_index("u", b - 1, n_u)?;
            }
            if c > 0 {
                check_index("w", c - 1, disturbance.dim())?;
            }
        }
        Ok(Self {
            equations,
            n_u,
            disturbance,
        })
    }

    /// Parses one expression per state.
    pub fn parse(
        sources: &[impl AsRef<str>],
        params: &HashMap<String, f64>,
        n_u: usize,
        disturbance: DisturbanceSpec,
    ) -> Result<Self> {
        let eqs = sources
            .iter()
            .map(|s| DynamicsExpr::parse(s.as_ref(), params))
            .collect::<Result<Vec<_>>>()?;
        Self::new(eqs, n_u, disturbance)
    }

    pub fn state_dim(&self) -> usize {
        self.equations.len()
    }

    pub fn input_dim(&self) -> usize {
        self.n_u
    }

    pub fn disturbance(&self) -> &DisturbanceSpec {
        &self.disturbance
    }

    pub fn equations(&self) -> &[DynamicsExpr] {
        &self.equations
    }

    pub fn eval(&self, x: &[f64], u: &[f64], w: &[f64]) -> Array1<f64> {
        self.equations.iter().map(|e| e.eval(x, u, w)).collect()
    }

    fn check_dims(&self, nx: usize, nu: usize) -> Result<()> {
        crate::error::check_dim("plant state", self.state_dim(), nx)?;
        crate::error::check_dim("plant input", self.n_u, nu)
    }

    pub fn step_szono(
        &self,
        x: &SZonotope,
        u: &SZonotope,
        provider: &SymbolProvider,
    ) -> Result<StepOutput<SZonotope>> {
        self.check_dims(x.dim(), u.dim())?;
        let cx = StepContext::new(x, u, self.disturbance.amplitudes(), provider);
        let rows = self
            .equations
            .iter()
            .map(|e| e.eval_szono_in(&cx))
            .collect::<Result<Vec<_>>>()?;
        Ok(StepOutput {
            next: SZonotope::vcat_all(&rows),
            disturbance_ids: cx.disturbance_ids(),
        })
    }

    pub fn step_spoly(
        &self,
        x: &SPolynotope,
        u: &SPolynotope,
        refine_depth: usize,
        provider: &SymbolProvider,
    ) -> Result<StepOutput<SPolynotope>> {
        self.check_dims(x.dim(), u.dim())?;
        let cx = StepContext::new(x, u, self.disturbance.amplitudes(), provider);
        let rows = self
            .equations
            .iter()
            .map(|e| e.eval_spoly_in(&cx, refine_depth))
            .collect::<Result<Vec<_>>>()?;
        Ok(StepOutput {
            next: SPolynotope::vcat_all(&rows),
            disturbance_ids: cx.disturbance_ids(),
        })
    }
}

/// Recursive-descent parser for update expressions.
///
/// ```text
/// expr  := term (('+' | '-') term)*
/// term  := unary (('*' | '/') unary)*
/// unary := '-' unary | power
/// power := atom ('^' integer)?
/// atom  := number | name | name '(' expr ')' | '(' expr ')'
/// ```
///
/// Names are `x<k>`, `u<k>`, `w<k>` (1-based), `pi`, or a parameter.
struct Parser<'a> {
    src: &'a str,
    pos: usize,
    params: &'a HashMap<String, f64>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, params: &'a HashMap<String, f64>) -> Self {
        Self { src, pos: 0, params }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn parse(mut self) -> Result<DynamicsExpr> {
        let e = self.expr()?;
        self.skip_ws();
        if self.pos < self.src.len() {
            return self.err("unexpected trailing input");
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<DynamicsExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = DynamicsExpr::Add(Box::new(lhs), Box::new(self.term()?)).fold();
            } else if self.eat('-') {
                lhs = DynamicsExpr::Sub(Box::new(lhs), Box::new(self.term()?)).fold();
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<DynamicsExpr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = DynamicsExpr::Mul(Box::new(lhs), Box::new(self.unary()?)).fold();
            } else if self.eat('/') {
                let at = self.pos;
                let rhs = self.unary()?;
                lhs = match rhs {
                    DynamicsExpr::Const(0.0) => {
                        self.pos = at;
                        return self.err("division by zero");
                    }
                    DynamicsExpr::Const(c) => DynamicsExpr::Scale(1.0 / c, Box::new(lhs)),
                    rhs => DynamicsExpr::Mul(
                        Box::new(lhs),
                        Box::new(DynamicsExpr::Univariate(Primitive::Recip, Box::new(rhs))),
                    ),
                }
                .fold();
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<DynamicsExpr> {
        if self.eat('-') {
            Ok(DynamicsExpr::Scale(-1.0, Box::new(self.unary()?)).fold())
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<DynamicsExpr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let Ok(n) = self.src[start..self.pos].parse::<u32>() else {
            self.pos = start;
            return self.err("expected a non-negative integer exponent");
        };
        if n == 0 {
            return Ok(DynamicsExpr::Const(1.0));
        }
        let mut acc = base.clone();
        for _ in 1..n {
            acc = DynamicsExpr::Mul(Box::new(acc), Box::new(base.clone())).fold();
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<DynamicsExpr> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => {
                while self
                    .peek()
                    .is_some_and(|c| c.is_alphanumeric() || c == '_')
                {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                if self.eat('(') {
                    let Ok(prim) = name.parse::<Primitive>() else {
                        self.pos = start;
                        return self.err(format!("unknown function `{name}`"));
                    };
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return self.err("expected `)`");
                    }
                    return Ok(DynamicsExpr::Univariate(prim, Box::new(arg)).fold());
                }
                self.variable(name, start)
            }
            Some(c) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }

    fn variable(&mut self, name: &str, start: usize) -> Result<DynamicsExpr> {
        if let Some(v) = self.params.get(name) {
            return Ok(DynamicsExpr::Const(*v));
        }
        if name == "pi" {
            return Ok(DynamicsExpr::Const(PI));
        }
        let (head, idx) = name.split_at(1);
        if let Ok(k) = idx.parse::<usize>() {
            if k >= 1 {
                match head {
                    "x" => return Ok(DynamicsExpr::State(k - 1)),
                    "u" => return Ok(DynamicsExpr::Input(k - 1)),
                    "w" => return Ok(DynamicsExpr::Disturbance(k - 1)),
                    _ => {}
                }
            }
        }
        self.pos = start;
        self.err(format!("unknown identifier `{name}`"))
    }

    fn number(&mut self) -> Result<DynamicsExpr> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        match self.src[start..end].parse::<f64>() {
            Ok(v) => {
                self.pos = end;
                Ok(DynamicsExpr::Const(v))
            }
            Err(_) => self.err(format!("malformed number `{}`", &self.src[start..end])),
        }
    }
}
