#![allow(dead_code)]

use std::path::PathBuf;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symreach::{ActivationKind, Layer, Network};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn benchmarks() -> PathBuf {
    repo_root().join("benchmarks")
}

/// Dense network with Gaussian-ish weights of size `scale / sqrt(fan_in)`;
/// the last layer is linear.
pub fn random_net(rng: &mut ChaCha8Rng, widths: &[usize], act: ActivationKind, scale: f64) -> Network {
    let n = widths.len() - 1;
    let layers = (0..n)
        .map(|k| {
            let (i, o) = (widths[k], widths[k + 1]);
            let s = scale / (i as f64).sqrt();
            let w = Array2::from_shape_fn((o, i), |_| s * rng.random_range(-1.0..1.0));
            let b = Array1::from_shape_fn(o, |_| 0.2 * rng.random_range(-1.0..1.0));
            let a = if k + 1 == n { ActivationKind::Linear } else { act };
            Layer::new(w, b, a).unwrap()
        })
        .collect();
    Network::new(layers).unwrap()
}
