#![allow(dead_code)]

use std::collections::HashMap;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symreach::{
    ActivationKind, Layer, Monomial, Network, SPolynotope, SZonotope, SymbolId,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random set of dimension `n` over a random subset of the symbols `pool`.
pub fn random_szono(rng: &mut ChaCha8Rng, n: usize, pool: &[u64]) -> SZonotope {
    let ids: Vec<SymbolId> = pool
        .iter()
        .filter(|_| rng.random_bool(0.7))
        .map(|&i| SymbolId(i))
        .collect();
    let c = Array1::from_shape_fn(n, |_| rng.random_range(-2.0..2.0));
    let g = Array2::from_shape_fn((n, ids.len()), |_| rng.random_range(-1.0..1.0));
    SZonotope::new(c, g, ids).unwrap()
}

pub fn random_valuation(rng: &mut ChaCha8Rng, ids: &[SymbolId]) -> HashMap<SymbolId, f64> {
    ids.iter().map(|&id| (id, rng.random_range(-1.0..=1.0))).collect()
}

pub fn random_directions(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Array1<f64>> {
    (0..k)
        .map(|_| {
            let v: Array1<f64> = Array1::from_shape_fn(n, |_| rng.random_range(-1.0..1.0));
            let norm = v.dot(&v).sqrt().max(1e-12);
            v / norm
        })
        .collect()
}

/// Number of directions in which `y` exceeds the support of `x`.
pub fn support_violations(x: &SZonotope, y: &Array1<f64>, dirs: &[Array1<f64>]) -> usize {
    dirs.iter()
        .filter(|h| h.dot(y) > x.support(h.view()).unwrap() + 1e-9)
        .count()
}

pub fn random_net(rng: &mut ChaCha8Rng, widths: &[usize], act: ActivationKind, scale: f64) -> Network {
    let layers = widths
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            let last = k + 2 == widths.len();
            let bound = scale / (w[0] as f64).sqrt();
            let wts = Array2::from_shape_fn((w[1], w[0]), |_| rng.random_range(-bound..bound));
            let b = Array1::from_shape_fn(w[1], |_| rng.random_range(-0.3..0.3));
            Layer::new(wts, b, if last { ActivationKind::Linear } else { act }).unwrap()
        })
        .collect();
    Network::new(layers).unwrap()
}

/// Random 1-D polynotope of degree at most `max_deg` over symbols 1..=q.
pub fn random_spoly(rng: &mut ChaCha8Rng, q: u64, max_deg: u32, terms: usize) -> SPolynotope {
    let mut acc = SPolynotope::scalar(rng.random_range(-1.0..1.0));
    for _ in 0..terms {
        let deg = rng.random_range(1..=max_deg);
        let powers: Vec<(SymbolId, u32)> = (0..deg).map(|_| (SymbolId(rng.random_range(1..=q)), 1)).collect();
        let m = Monomial::from_powers(powers);
        let coef = rng.random_range(-1.0..1.0);
        let term = SPolynotope::new(Array1::zeros(1), Array2::from_elem((1, 1), coef), vec![m]).unwrap();
        acc = acc.add(&term).unwrap();
    }
    acc
}
