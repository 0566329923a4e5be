mod common;

use std::collections::HashMap;

use common::*;
use ndarray::array;
use symreach::partition::run;
use symreach::{
    reach::verify, run_open_loop, ActivationKind, Controller, DisturbanceSpec, Layer, Network,
    PartitionOptions, Plant, Polyhedron, RAProblem, SZonotope, SplitMode, SymbolProvider,
};

/// x⁺ = g(x) with a three-neuron ReLU controller; the true image of
/// [-1, 1] lies in [-0.31, 0.31] but its one-shot abstraction does not.
fn synthetic() -> RAProblem {
    let hidden = Layer::new(
        array![[0.54], [0.87], [-1.26]],
        array![-0.36, 0.33, -0.52],
        ActivationKind::Relu,
    )
    .unwrap();
    let out = Layer::new(array![[0.39, -0.3, 0.36]], array![0.0], ActivationKind::Linear).unwrap();
    let net = Network::new(vec![hidden, out]).unwrap();
    let plant = Plant::parse(&["u1"], &HashMap::new(), 1, DisturbanceSpec::none()).unwrap();
    let x0 = SZonotope::from_box(&[-1.0], &[1.0], &SymbolProvider::new()).unwrap();
    let mut p = RAProblem::new(x0, Controller::new(net), plant, 1);
    p.goal = Some(Polyhedron::from_box(&[-0.31], &[0.31]).unwrap());
    p
}

/// Fewest dyadic splits after which every piece verifies (`None` beyond `depth`).
fn min_splits(p: &RAProblem, lo: f64, hi: f64, depth: u32) -> Option<usize> {
    let mut sub = p.clone();
    sub.x0 = SZonotope::from_box(&[lo], &[hi], &SymbolProvider::new()).unwrap();
    if verify(&sub).unwrap().is_ra_ok() {
        return Some(0);
    }
    if depth == 0 {
        return None;
    }
    let m = 0.5 * (lo + hi);
    Some(1 + min_splits(p, lo, m, depth - 1)? + min_splits(p, m, hi, depth - 1)?)
}

#[test]
fn synthetic_split_count_is_minimal() {
    let p = synthetic();
    assert!(!verify(&p).unwrap().is_ra_ok());
    let oracle = min_splits(&p, -1.0, 1.0, 4).unwrap();
    assert_eq!(oracle, 4);
    for mode in [SplitMode::Backward, SplitMode::Forward] {
        let r = run(&p, &PartitionOptions { max_splits: 30, mode, tol_f: None }).unwrap();
        assert!(r.is_ra_ok);
        assert_eq!(r.num_splits(), oracle);
        assert_eq!(r.leaves.len(), oracle + 1);
    }
}

#[test]
fn already_safe_needs_no_split() {
    let mut p = synthetic();
    p.goal = Some(Polyhedron::from_box(&[-5.0], &[5.0]).unwrap());
    let r = run(&p, &PartitionOptions::default()).unwrap();
    assert!(r.is_ra_ok);
    assert_eq!(r.num_splits(), 0);
    assert_eq!(r.leaves, vec![0]);
}

fn planar() -> RAProblem {
    let mut r = rng(5);
    let net = random_net(&mut r, &[2, 8, 1], ActivationKind::Tanh, 2.5);
    let plant = Plant::parse(
        &["0.9*x1 + 0.1*x2", "0.95*x2 + 0.1*u1 + 0.05*sin(x1)"],
        &HashMap::new(),
        1,
        DisturbanceSpec::none(),
    )
    .unwrap();
    let x0 = SZonotope::from_box(&[-1.0, -1.0], &[1.0, 0.5], &SymbolProvider::new()).unwrap();
    let mut p = RAProblem::new(x0, Controller::new(net), plant, 10);
    // unreachable by construction of the budget: forces splitting throughout
    p.goal = Some(Polyhedron::from_box(&[-0.2, -0.2], &[0.2, 0.2]).unwrap());
    p.avoid = vec![symreach::TimedSet { from: 3, to: 6, set: Polyhedron::from_box(&[1.5, -9.0], &[9.0, 9.0]).unwrap() }];
    p
}

#[test]
fn leaves_tile_the_initial_set() {
    let p = planar();
    let r = run(&p, &PartitionOptions { max_splits: 12, ..Default::default() }).unwrap();
    assert_eq!(r.leaves.len(), r.num_splits() + 1);
    let root = p.x0.interval_hull();
    let vol = |h: &[symreach::Interval]| h.iter().map(|i| i.width()).product::<f64>();
    let mut total = 0.0;
    for leaf in r.leaf_nodes() {
        let h = leaf.set.interval_hull();
        for (a, b) in h.iter().zip(&root) {
            assert!(a.lo >= b.lo - 1e-12 && a.hi <= b.hi + 1e-12);
        }
        total += vol(&h);
    }
    assert!((total - vol(&root)).abs() <= 1e-12);
}

#[test]
fn backward_selects_latest_error() {
    let p = planar();
    let r = run(&p, &PartitionOptions { max_splits: 12, ..Default::default() }).unwrap();
    assert!(!r.log.is_empty());
    for rec in &r.log {
        assert_eq!(rec.status, rec.live_max);
    }
    for (k, rec) in r.log.iter().enumerate() {
        assert_eq!(rec.children, [2 * k + 1, 2 * k + 2]);
    }
}

#[test]
fn failing_runs_count_as_worst() {
    let mut p = synthetic();
    p.plant = Plant::parse(&["1/(x1 - 0.5) + 0*u1"], &HashMap::new(), 1, DisturbanceSpec::none()).unwrap();
    p.goal = None;
    p.avoid = vec![symreach::TimedSet::always(Polyhedron::from_box(&[50.0], &[60.0]).unwrap())];
    let r = run(&p, &PartitionOptions { max_splits: 1, ..Default::default() }).unwrap();
    assert!(r.nodes[0].failed);
    assert_eq!(r.nodes[0].status, Some(1));
    // the half away from the pole runs fine, the other still fails
    let failed: Vec<bool> = r.leaf_nodes().map(|n| n.failed).collect();
    assert_eq!(failed, vec![true, false]);
}

fn arm_net(seed: u64) -> Network {
    random_net(&mut rng(seed), &[2, 5, 2], ActivationKind::Tanh, 3.0)
}

#[test]
fn accuracy_mode_shrinks_error_generators() {
    let net = arm_net(42);
    let x0 = SZonotope::from_box(&[-1.5, -1.5], &[1.5, 1.5], &SymbolProvider::new()).unwrap();
    let opts = PartitionOptions { max_splits: 50, mode: SplitMode::Accuracy, tol_f: None };
    let r = run_open_loop(&net, &x0, None, &opts).unwrap();
    assert_eq!(r.num_splits(), 50);
    assert_eq!(r.leaves.len(), 51);
    for w in r.max_error_radius.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{} > {}", w[1], w[0]);
    }
    let first = &r.max_error_radius;
    assert!(first[1] < first[0]);
}

#[test]
fn accuracy_tolerance_stops_early() {
    let net = arm_net(42);
    let x0 = SZonotope::from_box(&[-1.5, -1.5], &[1.5, 1.5], &SymbolProvider::new()).unwrap();
    let base = run_open_loop(&net, &x0, None, &PartitionOptions { max_splits: 0, ..Default::default() }).unwrap();
    assert_eq!(base.leaves.len(), 1);
    let tol = 0.9 * base.max_error_radius[0];
    let opts = PartitionOptions { max_splits: 400, mode: SplitMode::Accuracy, tol_f: Some(tol) };
    let r = run_open_loop(&net, &x0, None, &opts).unwrap();
    assert!(r.num_splits() > 0 && r.num_splits() < 400);
    assert!(*r.max_error_radius.last().unwrap() < tol);
    assert!(r.leaf_nodes().all(|n| n.error_radius < tol));
}

