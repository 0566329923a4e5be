//! Feed-forward networks and their symbolic abstraction.
//!
//! Each non-linear layer maps the pre-activation set `Z` to
//! `diag(α) Z + β + diag(γ) s_J` where `J` holds one fresh symbol per neuron.
//! Symbols of the input set pass through untouched, so the controller output
//! stays correlated with the state it was computed from.

use std::fmt;
use std::str::FromStr;

use ndarray::{s, Array1, Array2};

use crate::error::{check_dim, Error, Result};
use crate::spoly::SPolynotope;
use crate::symbols::{SymbolId, SymbolProvider};
use crate::szono::SZonotope;

/// Widths below this are treated as a single point.
pub const DEGENERATE_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActivationKind {
    Relu,
    Sigmoid,
    Tanh,
    Linear,
}

impl ActivationKind {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Self::Relu => x.max(0.0),
            Self::Sigmoid => sigmoid(x),
            Self::Tanh => x.tanh(),
            Self::Linear => x,
        }
    }

    /// Derivative; for ReLU the right derivative at 0.
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Self::Relu => {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Sigmoid => {
                let v = sigmoid(x);
                v * (1.0 - v)
            }
            Self::Tanh => 1.0 - x.tanh().powi(2),
            Self::Linear => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Relu => "relu",
            Self::Sigmoid => "sigmoid",
            Self::Tanh => "tanh",
            Self::Linear => "linear",
        }
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActivationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "relu" => Ok(Self::Relu),
            "sigmoid" | "logsig" => Ok(Self::Sigmoid),
            "tanh" => Ok(Self::Tanh),
            "linear" | "identity" | "affine" => Ok(Self::Linear),
            other => Err(Error::Network(format!("unknown activation `{other}`"))),
        }
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `x ↦ φ(W x + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    weights: Array2<f64>,
    bias: Array1<f64>,
    activation: ActivationKind,
}

impl Layer {
    pub fn new(weights: Array2<f64>, bias: Array1<f64>, activation: ActivationKind) -> Result<Self> {
        check_dim("layer bias", weights.nrows(), bias.len())?;
        if weights.iter().chain(bias.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("layer parameters"));
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn bias(&self) -> &Array1<f64> {
        &self.bias
    }

    pub fn activation(&self) -> ActivationKind {
        self.activation
    }

    pub fn input_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn eval(&self, x: &Array1<f64>) -> Array1<f64> {
        let act = self.activation;
        (self.weights.dot(x) + &self.bias).mapv(|v| act.eval(v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Network("a network needs at least one layer".into()));
        }
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[0].output_dim() != pair[1].input_dim() {
                return Err(Error::Network(format!(
                    "layer {} outputs {} values but layer {} expects {}",
                    k,
                    pair[0].output_dim(),
                    k + 1,
                    pair[1].input_dim()
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].output_dim()
    }

    /// Number of fresh symbols one affine propagation allocates.
    pub fn num_nonlinear_neurons(&self) -> usize {
        self.layers
            .iter()
            .filter(|l| l.activation != ActivationKind::Linear)
            .map(Layer::output_dim)
            .sum()
    }

    pub fn eval(&self, x: &Array1<f64>) -> Array1<f64> {
        self.layers.iter().fold(x.clone(), |acc, l| l.eval(&acc))
    }
}

/// Sandwich `αx + β ± γ` around an activation on `[l, u]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineTriplet {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl AffineTriplet {
    pub const IDENTITY: Self = Self {
        alpha: 1.0,
        beta: 0.0,
        gamma: 0.0,
    };
    pub const ZERO: Self = Self {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
    };

    fn constant(lo: f64, hi: f64) -> Self {
        Self {
            alpha: 0.0,
            beta: 0.5 * (lo + hi),
            gamma: 0.5 * (hi - lo).abs(),
        }
    }
}

/// Sandwich `α₂x² + α₁x + β ± γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadCoeffs {
    pub alpha2: f64,
    pub alpha1: f64,
    pub beta: f64,
    pub gamma: f64,
}

fn check_interval(l: f64, u: f64) -> Result<()> {
    if !(l.is_finite() && u.is_finite()) {
        return Err(Error::NonFinite("activation bounds"));
    }
    if l >= u {
        return Err(Error::InvalidInterval { lo: l, hi: u });
    }
    Ok(())
}

/// Minimal-`γ` affine sandwich for ReLU on `[l, u]` (secant slope).
pub fn relu_triplet(l: f64, u: f64) -> Result<AffineTriplet> {
    check_interval(l, u)?;
    let phi = |x: f64| x.max(0.0);
    let alpha = (phi(u) - phi(l)) / (u - l);
    let beta = (phi(l) - alpha * l) / 2.0;
    Ok(AffineTriplet {
        alpha,
        beta,
        gamma: beta,
    })
}

/// Affine sandwich for sigmoid/tanh on `[l, u]` with the smaller end slope.
pub fn sshape_triplet(kind: ActivationKind, l: f64, u: f64) -> Result<AffineTriplet> {
    if !matches!(kind, ActivationKind::Sigmoid | ActivationKind::Tanh) {
        return Err(Error::Network(format!("`{kind}` is not an s-shaped activation")));
    }
    check_interval(l, u)?;
    let (fl, fu) = (kind.eval(l), kind.eval(u));
    if u - l < DEGENERATE_WIDTH {
        return Ok(AffineTriplet::constant(fl, fu));
    }
    let alpha = kind.derivative(l).min(kind.derivative(u));
    Ok(AffineTriplet {
        alpha,
        beta: (fu + fl - alpha * (u + l)) / 2.0,
        gamma: ((fu - fl - alpha * (u - l)) / 2.0).max(0.0),
    })
}

/// Triplet for any activation on `[l, u]`, including stable and degenerate
/// ranges (`l == u` allowed).
pub fn activation_triplet(kind: ActivationKind, l: f64, u: f64) -> Result<AffineTriplet> {
    if !(l.is_finite() && u.is_finite()) {
        return Err(Error::NonFinite("activation bounds"));
    }
    if l > u {
        return Err(Error::InvalidInterval { lo: l, hi: u });
    }
    match kind {
        ActivationKind::Linear => Ok(AffineTriplet::IDENTITY),
        ActivationKind::Relu if l >= 0.0 => Ok(AffineTriplet::IDENTITY),
        ActivationKind::Relu if u <= 0.0 => Ok(AffineTriplet::ZERO),
        _ if u - l < DEGENERATE_WIDTH => Ok(AffineTriplet::constant(kind.eval(l), kind.eval(u))),
        ActivationKind::Relu => relu_triplet(l, u),
        _ => sshape_triplet(kind, l, u),
    }
}

/// Quadratic ReLU sandwich for `l < 0 < u`. `None` when neither of the two
/// ratio cases `|l| ≤ u ≤ 2|l|`, `u < |l| ≤ 2u` applies.
pub fn relu_quadratic(l: f64, u: f64) -> Result<Option<QuadCoeffs>> {
    if !(l < 0.0 && 0.0 < u) || !l.is_finite() || !u.is_finite() {
        return Err(Error::NotStraddling { lo: l, hi: u });
    }
    let al = -l;
    if al <= u && u <= 2.0 * al {
        let alpha2 = 1.0 / (2.0 * u);
        let g = alpha2 * u * u / 8.0;
        Ok(Some(QuadCoeffs {
            alpha2,
            alpha1: 1.0 - alpha2 * u,
            beta: g,
            gamma: g,
        }))
    } else if u < al && al <= 2.0 * u {
        let alpha2 = -1.0 / (2.0 * l);
        let g = alpha2 * l * l / 8.0;
        Ok(Some(QuadCoeffs {
            alpha2,
            alpha1: -alpha2 * l,
            beta: g,
            gamma: g,
        }))
    } else {
        Ok(None)
    }
}

/// Controller abstraction `U = ⟨c, [G, H], [I; J]⟩` of `net` over `x`.
///
/// Every non-linear layer allocates one fresh symbol per neuron, including
/// stable neurons whose column is zero. Linear layers are exact.
pub fn propagate_affine(
    x: &SZonotope,
    net: &Network,
    provider: &SymbolProvider,
) -> Result<SZonotope> {
    check_dim("network input", net.input_dim(), x.dim())?;
    let mut cur = x.clone();
    for layer in net.layers() {
        let z = cur.linear_image(layer.weights())?.translate(layer.bias())?;
        if layer.activation() == ActivationKind::Linear {
            cur = z;
            continue;
        }
        let bounds = z.interval_hull();
        let triplets = bounds
            .iter()
            .map(|b| activation_triplet(layer.activation(), b.lo, b.hi))
            .collect::<Result<Vec<_>>>()?;
        let n = z.dim();
        let p = z.num_symbols();
        let fresh = provider.fresh_ids(n);

        let mut center = Array1::zeros(n);
        let mut g = Array2::zeros((n, p + n));
        for (i, t) in triplets.iter().enumerate() {
            center[i] = t.alpha * z.center()[i] + t.beta;
            g.slice_mut(s![i, ..p])
                .assign(&(&z.generators().row(i) * t.alpha));
            g[[i, p + i]] = t.gamma;
        }
        let mut ids = z.ids().to_vec();
        ids.extend(fresh);
        if center.iter().chain(g.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("network propagation"));
        }
        cur = SZonotope::from_parts(center, g, ids);
    }
    Ok(cur)
}

/// Settings of the polynomial propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyOptions {
    /// 1 for affine neuron abstractions, 2 to use the quadratic ReLU sandwich
    /// where applicable.
    pub order: u32,
    /// Monomials kept per layer output.
    pub monomial_budget: usize,
    /// Monomials above this degree are always enclosed.
    pub max_degree: u32,
    /// Bisection depth for pre-activation bounds.
    pub refine_depth: usize,
}

impl Default for PolyOptions {
    fn default() -> Self {
        Self {
            order: 2,
            monomial_budget: 200,
            max_degree: 6,
            refine_depth: 2,
        }
    }
}

/// Abstracts one neuron `φ(z)` over the 1-D polynotope `z` using `error` as
/// the error symbol.
pub fn activate_poly(
    z: &SPolynotope,
    kind: ActivationKind,
    order: u32,
    refine_depth: usize,
    error: SymbolId,
) -> Result<SPolynotope> {
    check_dim("neuron", 1, z.dim())?;
    if kind == ActivationKind::Linear {
        return Ok(z.clone());
    }
    let b = z.refine_bound(refine_depth)?;
    if order >= 2 && kind == ActivationKind::Relu && b.lo < 0.0 && b.hi > 0.0 {
        if let Some(q) = relu_quadratic(b.lo, b.hi)? {
            let quad = z.pow(2)?.scale(q.alpha2);
            let err = SPolynotope::symbol(error).scale(q.gamma);
            return quad.add(&z.scale(q.alpha1))?.add(&err).map(|p| p.shift(q.beta));
        }
    }
    let t = activation_triplet(kind, b.lo, b.hi)?;
    z.scale(t.alpha)
        .shift(t.beta)
        .add(&SPolynotope::symbol(error).scale(t.gamma))
}

/// Polynomial counterpart of [`propagate_affine`].
pub fn propagate_poly(
    p: &SPolynotope,
    net: &Network,
    opts: &PolyOptions,
    provider: &SymbolProvider,
) -> Result<SPolynotope> {
    check_dim("network input", net.input_dim(), p.dim())?;
    if !(1..=2).contains(&opts.order) {
        return Err(Error::Problem(format!(
            "polynomial abstraction order must be 1 or 2, got {}",
            opts.order
        )));
    }
    let mut cur = p.clone();
    for layer in net.layers() {
        let z = cur.linear_image(layer.weights())?.translate(layer.bias())?;
        if layer.activation() == ActivationKind::Linear {
            cur = z;
            continue;
        }
        let fresh = provider.fresh_ids(z.dim());
        let rows = (0..z.dim())
            .map(|i| {
                activate_poly(
                    &z.row(i),
                    layer.activation(),
                    opts.order,
                    opts.refine_depth,
                    fresh[i],
                )
            })
            .collect::<Result<Vec<_>>>()?;
        cur = SPolynotope::vcat_all(&rows).reduce_monomials(
            opts.monomial_budget,
            opts.max_degree,
            provider,
        );
        if cur.center().iter().chain(cur.generators().iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("network propagation"));
        }
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spoly::Monomial;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sandwich_ok(f: impl Fn(f64) -> f64, lo_line: impl Fn(f64) -> f64, hi_line: impl Fn(f64) -> f64, l: f64, u: f64) -> bool {
        (0..=200).all(|k| {
            let x = l + (u - l) * f64::from(k) / 200.0;
            let y = f(x);
            y >= lo_line(x) - 1e-9 && y <= hi_line(x) + 1e-9
        })
    }

    #[test]
    fn relu_triplet_cases() {
        let t = relu_triplet(-1.0, 2.0).unwrap();
        assert_abs_diff_eq!(t.alpha, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.beta, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.gamma, 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(activation_triplet(ActivationKind::Relu, 0.5, 2.0).unwrap(), AffineTriplet::IDENTITY);
        assert_eq!(activation_triplet(ActivationKind::Relu, -3.0, -1.0).unwrap(), AffineTriplet::ZERO);
        assert!(matches!(relu_triplet(1.0, 1.0), Err(Error::InvalidInterval { .. })));
    }

    #[test]
    fn sshape_triplet_cases() {
        let t = sshape_triplet(ActivationKind::Tanh, -1.0, 1.0).unwrap();
        assert_abs_diff_eq!(t.alpha, 0.419_974_341_614_026_1, epsilon = 1e-12);
        assert_abs_diff_eq!(t.beta, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.gamma, 0.341_619_814_341_738_7, epsilon = 1e-12);
        let s = sshape_triplet(ActivationKind::Sigmoid, -2.0, 2.0).unwrap();
        assert_abs_diff_eq!(s.beta, 0.5, epsilon = 1e-15);
        let d = activation_triplet(ActivationKind::Tanh, 0.3, 0.3).unwrap();
        assert_eq!(d.alpha, 0.0);
        assert_eq!(d.beta, 0.3f64.tanh());
        assert_eq!(d.gamma, 0.0);
        assert!(sshape_triplet(ActivationKind::Relu, -1.0, 1.0).is_err());
        assert!(sshape_triplet(ActivationKind::Tanh, 1.0, -1.0).is_err());
    }

    #[test]
    fn relu_quadratic_cases() {
        let expected = QuadCoeffs {
            alpha2: 0.25,
            alpha1: 0.5,
            beta: 0.125,
            gamma: 0.125,
        };
        assert_eq!(relu_quadratic(-1.0, 2.0).unwrap(), Some(expected));
        assert_eq!(relu_quadratic(-2.0, 1.0).unwrap(), Some(expected));
        assert_eq!(relu_quadratic(-0.1, 2.0).unwrap(), None);
        assert!(relu_quadratic(0.5, 2.0).is_err());
    }

    #[test]
    fn relu_triplet_is_locally_optimal() {
        let (l, u) = (-1.3, 2.1);
        let t = relu_triplet(l, u).unwrap();
        for a in [t.alpha * 0.99, t.alpha * 1.01] {
            // best β, γ covering relu with slope a: half the range of relu(x) - a x
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for k in 0..=10_000 {
                let x = l + (u - l) * f64::from(k) / 10_000.0;
                let e = x.max(0.0) - a * x;
                lo = lo.min(e);
                hi = hi.max(e);
            }
            assert!((hi - lo) / 2.0 >= t.gamma - 1e-12);
        }
    }

    proptest! {
        #[test]
        fn triplets_cover(l in -8.0f64..8.0, w in 1e-3f64..10.0, kind in prop_oneof![
            Just(ActivationKind::Relu), Just(ActivationKind::Sigmoid), Just(ActivationKind::Tanh)
        ]) {
            let u = l + w;
            let t = activation_triplet(kind, l, u).unwrap();
            prop_assert!(t.gamma >= 0.0);
            prop_assert!(sandwich_ok(
                |x| kind.eval(x),
                |x| t.alpha * x + t.beta - t.gamma,
                |x| t.alpha * x + t.beta + t.gamma,
                l, u,
            ));
        }

        #[test]
        fn quadratic_covers_and_is_tighter(u in 0.01f64..10.0, ratio in 0.5f64..2.0) {
            let l = -u / ratio;
            if let Some(q) = relu_quadratic(l, u).unwrap() {
                let poly = |x: f64| q.alpha2 * x * x + q.alpha1 * x + q.beta;
                prop_assert!(sandwich_ok(|x| x.max(0.0), |x| poly(x) - q.gamma, |x| poly(x) + q.gamma, l, u));
                let aff = relu_triplet(l, u).unwrap();
                prop_assert!(q.gamma <= 0.375 * aff.gamma + 1e-12);
            }
        }
    }

    fn random_net(rng: &mut ChaCha8Rng, widths: &[usize], act: ActivationKind) -> Network {
        let layers = widths
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                let last = k + 2 == widths.len();
                let wts = Array2::from_shape_fn((w[1], w[0]), |_| rng.random_range(-1.0..1.0));
                let b = Array1::from_shape_fn(w[1], |_| rng.random_range(-0.5..0.5));
                Layer::new(wts, b, if last { ActivationKind::Linear } else { act }).unwrap()
            })
            .collect();
        Network::new(layers).unwrap()
    }

    #[test]
    fn zero_weight_network_is_a_point() {
        let layers = vec![
            Layer::new(Array2::zeros((3, 2)), array![1.0, -1.0, 0.0], ActivationKind::Relu).unwrap(),
            Layer::new(Array2::zeros((1, 3)), array![0.7], ActivationKind::Linear).unwrap(),
        ];
        let net = Network::new(layers).unwrap();
        let p = SymbolProvider::new();
        let x = SZonotope::from_box(&[-1.0, -1.0], &[1.0, 1.0], &p).unwrap();
        let u = propagate_affine(&x, &net, &p).unwrap();
        assert_eq!(u.center(), &array![0.7]);
        assert!(u.generators().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_linear_network_is_exact() {
        let net = Network::new(vec![Layer::new(Array2::eye(2), Array1::zeros(2), ActivationKind::Linear).unwrap()]).unwrap();
        let p = SymbolProvider::new();
        let x = SZonotope::from_box(&[-1.0, 0.0], &[1.0, 3.0], &p).unwrap();
        assert_eq!(propagate_affine(&x, &net, &p).unwrap(), x);
    }

    #[test]
    fn fresh_symbol_bookkeeping() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = random_net(&mut rng, &[2, 10, 7, 2], ActivationKind::Relu);
        let p = SymbolProvider::new();
        let x = SZonotope::from_box(&[-1.0, -1.0], &[1.0, 1.0], &p).unwrap();
        let u = propagate_affine(&x, &net, &p).unwrap();
        assert_eq!(u.num_symbols(), 2 + 17);
        assert_eq!(&u.ids()[..2], x.ids());
    }

    #[test]
    fn affine_propagation_is_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for act in [ActivationKind::Relu, ActivationKind::Tanh, ActivationKind::Sigmoid] {
            let net = random_net(&mut rng, &[2, 10, 2], act);
            let p = SymbolProvider::new();
            let x = SZonotope::from_box(&[-1.0, 0.0], &[1.0, 0.5], &p).unwrap();
            let u = propagate_affine(&x, &net, &p).unwrap();
            let dirs: Vec<Array1<f64>> = (0..50)
                .map(|_| {
                    let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    array![a.cos(), a.sin()]
                })
                .collect();
            let sup: Vec<f64> = dirs.iter().map(|h| u.support(h.view()).unwrap()).collect();
            for _ in 0..2000 {
                let pt = array![rng.random_range(-1.0..1.0), rng.random_range(0.0..0.5)];
                let y = net.eval(&pt);
                for (h, s) in dirs.iter().zip(&sup) {
                    assert!(h.dot(&y) <= s + 1e-9);
                }
            }
        }
    }

    #[test]
    fn example_neuron_quadratic_expansion() {
        let s1 = SPolynotope::symbol(SymbolId(1));
        let s2 = SPolynotope::symbol(SymbolId(2));
        let z = s1.scale(-0.5).add(&s1.multiply(&s2).unwrap()).unwrap().shift(0.5);
        let out = activate_poly(&z, ActivationKind::Relu, 2, 2, SymbolId(3)).unwrap();
        let mono = |p: &[(u64, u32)]| Monomial::from_powers(p.iter().map(|&(i, e)| (SymbolId(i), e)));
        let expect = [
            (vec![(1, 1)], -0.375),
            (vec![(1, 2)], 0.0625),
            (vec![(3, 1)], 0.125),
            (vec![(1, 1), (2, 1)], 0.75),
            (vec![(1, 2), (2, 1)], -0.25),
            (vec![(1, 2), (2, 2)], 0.25),
        ];
        assert_abs_diff_eq!(out.center()[0], 0.4375, epsilon = 1e-12);
        for (m, v) in expect {
            assert_abs_diff_eq!(out.coefficient(&mono(&m))[0], v, epsilon = 1e-12);
        }
        assert_eq!(out.num_monomials(), 6);
    }

    #[test]
    fn poly_order_one_matches_affine() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = random_net(&mut rng, &[2, 6, 2], ActivationKind::Tanh);
        let x = SZonotope::from_box(&[-1.0, -1.0], &[1.0, 1.0], &SymbolProvider::new()).unwrap();
        let pa = SymbolProvider::starting_at(100);
        let pp = SymbolProvider::starting_at(100);
        let a = propagate_affine(&x, &net, &pa).unwrap();
        let opts = PolyOptions {
            order: 1,
            monomial_budget: 1000,
            max_degree: 1,
            refine_depth: 0,
        };
        let b = propagate_poly(&SPolynotope::from_szonotope(&x), &net, &opts, &pp).unwrap();
        let b = b.to_szonotope().unwrap();
        for i in 0..2 {
            assert_abs_diff_eq!(a.center()[i], b.center()[i], epsilon = 1e-12);
        }
        for (k, id) in a.ids().iter().enumerate() {
            let col = b.column(*id).map(|c| c.to_owned()).unwrap_or_else(|| Array1::zeros(2));
            for i in 0..2 {
                assert_abs_diff_eq!(a.generators()[[i, k]], col[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn poly_propagation_is_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let net = random_net(&mut rng, &[2, 12, 12, 2], ActivationKind::Relu);
        let p = SymbolProvider::new();
        let x = SZonotope::from_box(&[-1.0, -1.0], &[1.0, 1.0], &p).unwrap();
        let opts = PolyOptions {
            monomial_budget: 40,
            ..PolyOptions::default()
        };
        let out = propagate_poly(&SPolynotope::from_szonotope(&x), &net, &opts, &p).unwrap();
        let hull = out.interval_hull();
        for _ in 0..5000 {
            let (a, b) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let y = net.eval(&array![a, b]);
            for i in 0..2 {
                assert!(hull[i].lo - 1e-9 <= y[i] && y[i] <= hull[i].hi + 1e-9);
            }
        }
    }

    #[test]
    fn network_validation() {
        let l1 = Layer::new(Array2::zeros((3, 2)), Array1::zeros(3), ActivationKind::Relu).unwrap();
        let l2 = Layer::new(Array2::zeros((1, 2)), Array1::zeros(1), ActivationKind::Linear).unwrap();
        assert!(matches!(Network::new(vec![l1, l2]), Err(Error::Network(_))));
        assert!(Layer::new(Array2::zeros((2, 2)), Array1::zeros(3), ActivationKind::Relu).is_err());
        assert!(Layer::new(array![[f64::NAN]], array![0.0], ActivationKind::Relu).is_err());
        assert!("swish".parse::<ActivationKind>().is_err());
        assert_eq!("Tanh".parse::<ActivationKind>().unwrap(), ActivationKind::Tanh);
    }
}
