//! The `verify`, `partition` and `bound-nn` commands.

use std::path::Path;
use std::time::Instant;

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symreach::{
    propagate_affine, propagate_poly, reach::verify, Engine, Interval, Network, PartitionOptions,
    Polyhedron, RAProblem, ReachResult, SPolynotope, SZonotope, SymbolProvider, TraceSet,
    ViolationKind,
};

use crate::config::LoadedConfig;
use crate::error::{CliError, Result};
use crate::report::{
    mode_name, write_json, write_trace, PartitionSummary, Report, SimulationSummary, SplitsFile,
    StepHull, Timings, Verdict, ViolationReport,
};

/// Everything a command produces.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub splits: Option<SplitsFile>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        self.report.verdict.exit_code()
    }

    /// Writes `report.json`, `trace.csv` and, for partitions, `splits.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_owned(),
            source,
        })?;
        write_json(&dir.join("report.json"), &self.report)?;
        write_trace(&dir.join("trace.csv"), &self.report.steps)?;
        if let Some(s) = &self.splits {
            write_json(&dir.join("splits.json"), s)?;
        }
        Ok(())
    }
}

fn kind_name(k: ViolationKind) -> &'static str {
    match k {
        ViolationKind::Avoid => "avoid",
        ViolationKind::Goal => "goal",
    }
}

fn trace_hulls(r: &ReachResult, dt: f64) -> Vec<StepHull> {
    r.trace
        .iter()
        .zip(r.hulls())
        .enumerate()
        .map(|(k, (set, hull))| StepHull::new(k, k as f64 * dt, &hull, set.ids().len()))
        .collect()
}

fn seconds(since: Instant) -> f64 {
    since.elapsed().as_secs_f64()
}

pub fn cmd_verify(cfg: &LoadedConfig) -> Result<Outcome> {
    let start = Instant::now();
    let p = cfg.problem()?;
    let dt = cfg.config.dt;
    let t0 = Instant::now();
    let r = verify(&p)?;
    let analysis_s = seconds(t0);
    let steps = trace_hulls(&r, dt);
    let violation = r.violation.map(|v| ViolationReport {
        step: v.step,
        t: v.step as f64 * dt,
        kind: kind_name(v.kind),
        certified: v.certified,
    });
    let verdict = match &violation {
        None => Verdict::Verified,
        Some(v) if v.certified => Verdict::Violated { step: v.step, t: v.t },
        Some(v) => Verdict::Inconclusive {
            reason: format!("{} constraint not proven at step {}", v.kind, v.step),
        },
    };
    let simulation = (cfg.config.samples > 0).then(|| simulate(&p, &steps, cfg.config.samples, cfg.config.seed));
    Ok(Outcome {
        report: Report {
            command: "verify",
            name: cfg.config.name.clone(),
            verdict,
            t_err: r.t_err(),
            violation,
            steps,
            timings: Timings {
                analysis_s,
                total_s: seconds(start),
            },
            partition: None,
            simulation,
        },
        splits: None,
    })
}

/// Runs concrete closed-loop rollouts from random initial states and
/// disturbances and counts states outside the reported hulls.
pub fn simulate(p: &RAProblem, steps: &[StepHull], samples: usize, seed: u64) -> SimulationSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let box0 = p.x0.interval_hull();
    let amps = p.plant.disturbance().amplitudes().to_vec();
    let mut outside = 0;
    for _ in 0..samples {
        let mut x: Array1<f64> = box0.iter().map(|i| rng.random_range(i.lo..=i.hi)).collect();
        let mut u = Array1::zeros(p.controller.output_dim());
        for (k, s) in steps.iter().enumerate() {
            let tol = |v: f64| 1e-9 * v.abs().max(1.0);
            let out = x
                .iter()
                .zip(s.lo.iter().zip(&s.hi))
                .any(|(&v, (&lo, &hi))| !(v >= lo - tol(lo) && v <= hi + tol(hi)));
            outside += usize::from(out);
            if k + 1 == steps.len() {
                break;
            }
            if k % p.hold == 0 {
                u = p.controller.eval(&x);
            }
            let w: Vec<f64> = amps.iter().map(|&a| a * rng.random_range(-1.0..=1.0)).collect();
            x = p.plant.eval(x.as_slice().unwrap(), u.as_slice().unwrap(), &w);
        }
    }
    SimulationSummary { seed, samples, outside }
}

pub fn cmd_partition(cfg: &LoadedConfig, opts: &PartitionOptions) -> Result<Outcome> {
    let start = Instant::now();
    let p = cfg.problem()?;
    let dt = cfg.config.dt;
    let t0 = Instant::now();
    let r = symreach::partition::run(&p, opts)?;
    let analysis_s = seconds(t0);

    // Leaf traces for the tube; the partition itself keeps only witnesses.
    let mut steps: Vec<StepHull> = Vec::new();
    let mut certified: Option<usize> = None;
    let mut failed = 0;
    for leaf in r.leaf_nodes() {
        let mut sub = p.clone();
        sub.x0 = leaf.set.clone();
        sub.protect_initial = true;
        let Ok(run) = verify(&sub) else {
            failed += 1;
            continue;
        };
        if let Some(v) = run.violation.filter(|v| v.certified) {
            certified = Some(certified.map_or(v.step, |c| c.min(v.step)));
        }
        for (k, (set, hull)) in run.trace.iter().zip(run.hulls()).enumerate() {
            match steps.get_mut(k) {
                Some(s) => s.join(&hull, set.ids().len()),
                None => steps.push(StepHull::new(k, k as f64 * dt, &hull, set.ids().len())),
            }
        }
    }
    let verdict = if r.is_ra_ok {
        Verdict::Verified
    } else if let Some(step) = certified {
        Verdict::Violated { step, t: step as f64 * dt }
    } else if failed > 0 {
        Verdict::Inconclusive {
            reason: format!("{failed} leaves could not be analysed"),
        }
    } else {
        Verdict::Inconclusive {
            reason: format!("split budget of {} exhausted", opts.max_splits),
        }
    };
    let t_err = r.leaf_nodes().filter_map(|n| n.status).max();
    let splits = SplitsFile::new(&r, opts.mode);
    Ok(Outcome {
        report: Report {
            command: "partition",
            name: cfg.config.name.clone(),
            verdict,
            t_err,
            violation: None,
            steps,
            timings: Timings {
                analysis_s,
                total_s: seconds(start),
            },
            partition: Some(PartitionSummary {
                mode: mode_name(opts.mode),
                splits: r.num_splits(),
                leaves: r.leaves.len(),
                satisfied_leaves: r.leaf_nodes().filter(|n| n.status.is_none()).count(),
                max_error_radius: r.max_error_radius.clone(),
            }),
            simulation: None,
        },
        splits: Some(splits),
    })
}

/// Parses `lo:hi,lo:hi,...`.
pub fn parse_box(spec: &str) -> Result<Vec<Interval>> {
    spec.split(',')
        .map(|part| {
            let (lo, hi) = part
                .split_once(':')
                .ok_or_else(|| CliError::config(format!("expected lo:hi, got `{part}`")))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::config(format!("`{s}`: {e}")))
            };
            let (lo, hi) = (num(lo)?, num(hi)?);
            if lo.partial_cmp(&hi).is_none_or(|o| o.is_gt()) {
                return Err(CliError::config(format!("empty interval {lo}:{hi}")));
            }
            Ok(Interval { lo, hi })
        })
        .collect()
}

/// Output bound of `net` over a box, optionally checked against `goal`.
pub fn cmd_bound_nn(net: &Network, input: &[Interval], engine: Engine, goal: Option<&Polyhedron>) -> Result<Outcome> {
    let start = Instant::now();
    let lo: Vec<f64> = input.iter().map(|i| i.lo).collect();
    let hi: Vec<f64> = input.iter().map(|i| i.hi).collect();
    let x = SZonotope::from_box(&lo, &hi, &SymbolProvider::new())?;
    let provider = SymbolProvider::after(x.ids());
    let out = match engine {
        Engine::Affine => TraceSet::Zono(propagate_affine(&x, net, &provider)?),
        Engine::Poly(opts) => TraceSet::Poly(propagate_poly(&SPolynotope::from_szonotope(&x), net, &opts, &provider)?),
    };
    let depth = match engine {
        Engine::Affine => 0,
        Engine::Poly(o) => o.refine_depth,
    };
    let verdict = match goal {
        None => Verdict::Verified,
        Some(g) if out.contained_in(g, depth)? => Verdict::Verified,
        Some(g) if out.disjoint_from(g, depth)? => Verdict::Violated { step: 1, t: 1.0 },
        Some(_) => Verdict::Inconclusive {
            reason: "output bound meets the goal boundary".into(),
        },
    };
    let steps = vec![
        StepHull::new(0, 0.0, input, x.num_symbols()),
        StepHull::new(1, 1.0, &out.interval_hull(), out.ids().len()),
    ];
    let elapsed = seconds(start);
    Ok(Outcome {
        report: Report {
            command: "bound-nn",
            name: None,
            t_err: match verdict {
                Verdict::Violated { step, .. } => Some(step),
                _ => None,
            },
            verdict,
            violation: None,
            steps,
            timings: Timings {
                analysis_s: elapsed,
                total_s: elapsed,
            },
            partition: None,
            simulation: None,
        },
        splits: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_specs() {
        let b = parse_box("0.9:1.1, -2:3").unwrap();
        assert_eq!(b, vec![Interval { lo: 0.9, hi: 1.1 }, Interval { lo: -2.0, hi: 3.0 }]);
        for bad in ["", "1", "1:0", "a:b", "0:1,"] {
            assert!(parse_box(bad).is_err(), "{bad}");
        }
    }
}
