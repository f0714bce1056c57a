use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use super::config::ExperimentConfig;
use super::trace::{RegretTrace, ReplicaTrace};
use crate::adversaries::{AdversaryScript, CrfAdversary, PathoAdversary, TriangleAdversary};
use crate::c1nn::C1nn;
use crate::cluster::{FEps, FEpsBlock, TotallyBoundedFtime};
use crate::error::{Error, Result};
use crate::ewa::MeanEstimator;
use crate::learner::OnlineLearner;
use crate::processes::{make_process, ProcessKind};
use crate::seed::{child_rng, derive_seed};
use crate::selector::{
    BoxedLearner, Combiner, CsLearner, DyadicCells, PerInstance, TruncationSelector,
};
use crate::spaces::{FiniteLabels, Interval, PathologicalSpace, RealLine, UnitDisk, ValueSpace};

type ReplicaFn = fn(&ExperimentConfig, usize) -> Result<ReplicaTrace>;

struct Scenario {
    name: &'static str,
    comparators: &'static [&'static str],
    run: ReplicaFn,
}

const SCENARIOS: &[Scenario] = &[
    Scenario {
        name: "triangle-mean-est",
        comparators: &["center", "vertex"],
        run: triangle,
    },
    Scenario {
        name: "patho-k3",
        comparators: &["hindsight"],
        run: patho,
    },
    Scenario {
        name: "c1nn-threshold",
        comparators: &["truth"],
        run: c1nn_threshold,
    },
    Scenario {
        name: "combiner-synthetic",
        comparators: &["anti", "zero", "truth"],
        run: combiner_synthetic,
    },
    Scenario {
        name: "crf",
        comparators: &["target", "zero"],
        run: crf,
    },
    Scenario {
        name: "heavy-tail-truncation",
        comparators: &["zero"],
        run: heavy_tail,
    },
    Scenario {
        name: "cs-piecewise",
        comparators: &["truth", "zero"],
        run: cs_piecewise,
    },
    Scenario {
        name: "feps-interval",
        comparators: &["truth"],
        run: feps_interval,
    },
    Scenario {
        name: "feps-block",
        comparators: &["truth"],
        run: feps_block,
    },
];

pub fn scenario_names() -> Vec<&'static str> {
    SCENARIOS.iter().map(|s| s.name).collect()
}

/// Trace, CSV text and JSON summary of a run.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub trace: RegretTrace,
    pub replica_learner_avg: Vec<f64>,
    pub csv: String,
    pub summary: serde_json::Value,
}

impl RunOutput {
    /// Writes the CSV to `path` and the summary next to it with a `.json`
    /// extension.
    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, &self.csv)?;
        let sidecar = path.with_extension("json");
        let mut text = serde_json::to_string_pretty(&self.summary)?;
        text.push('\n');
        std::fs::write(&sidecar, text)?;
        Ok(sidecar)
    }
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let scenario = SCENARIOS
        .iter()
        .find(|s| s.name == config.scenario)
        .ok_or_else(|| Error::UnknownScenario(config.scenario.clone()))?;
    let replicas: Vec<ReplicaTrace> = (0..config.replicas)
        .into_par_iter()
        .map(|r| (scenario.run)(config, r))
        .collect::<Result<Vec<_>>>()?;
    let trace = RegretTrace::aggregate(scenario.comparators, &replicas);
    let per_replica: Vec<f64> = replicas
        .iter()
        .map(ReplicaTrace::average_learner_loss)
        .collect();
    let csv = trace.to_csv();
    let summary = summarize(config, &trace, &per_replica);
    Ok(RunOutput {
        trace,
        replica_learner_avg: per_replica,
        csv,
        summary,
    })
}

fn summarize(
    config: &ExperimentConfig,
    trace: &RegretTrace,
    per_replica: &[f64],
) -> serde_json::Value {
    let mut sorted = per_replica.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if sorted.is_empty() {
        0.0
    } else if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]) / 2.0
    };
    let mean = per_replica.iter().sum::<f64>() / per_replica.len().max(1) as f64;
    let last = trace.last();
    let t = last.map_or(0, |r| r.t);
    let comparators: serde_json::Map<String, serde_json::Value> = trace
        .comparator_names
        .iter()
        .enumerate()
        .map(|(i, n)| {
            (
                n.clone(),
                json!(last.map_or(0.0, |r| r.comparator_cum[i] / t as f64)),
            )
        })
        .collect();
    json!({
        "config": config,
        "final": {
            "t": t,
            "learner_avg": last.map_or(0.0, |r| r.learner_cum / t as f64),
            "comparator_avg": comparators,
            "excess_avg": last.map_or(0.0, |r| r.excess_avg),
        },
        "replica_learner_avg": {
            "mean": mean,
            "median": median,
            "min": sorted.first().copied().unwrap_or(0.0),
            "max": sorted.last().copied().unwrap_or(0.0),
        },
    })
}

fn learner_rng(c: &ExperimentConfig, r: usize) -> rand_chacha::ChaCha8Rng {
    child_rng(c.seed, "learner", r as u64)
}

fn adversary_rng(c: &ExperimentConfig, r: usize) -> rand_chacha::ChaCha8Rng {
    child_rng(c.seed, "adversary", r as u64)
}

fn uniform_instances(c: &ExperimentConfig, r: usize) -> Result<Vec<f64>> {
    let mut p = make_process(
        ProcessKind::IidUniform { lo: 0.0, hi: 1.0 },
        child_rng(c.seed, "process", r as u64),
    )?;
    Ok(p.take(c.horizon))
}

fn triangle(c: &ExperimentConfig, r: usize) -> Result<ReplicaTrace> {
    let space = UnitDisk::new(1.0)?;
    let mut learner = MeanEstimator::new(space.clone(), learner_rng(c, r))?;
    let mut adv = TriangleAdversary::new(adversary_rng(c, r));
    let centre = space.anchor();
    let vertex = TriangleAdversary::vertices()[0];
    let mut tr = ReplicaTrace::with_comparators(2, c.horizon);
    for t in 1..=c.horizon {
        let p: [f64; 2] = OnlineLearner::<(), _>::predict(&mut learner, &())?;
        let y = adv.respond(t, &(), &[]);
        OnlineLearner::<(), _>::observe(&mut learner, &y)?;
        tr.push(
            space.loss(&p, &y),
            &[space.loss(&centre, &y), space.loss(&vertex, &y)],
        );
    }
    Ok(tr)
}

/// One pass over the hard block: the horizon is `k` steps, whatever `T` says.
fn patho(c: &ExperimentConfig, r: usize) -> Result<ReplicaTrace> {
    let k: u32 = c.param("k", 3)?;
    let space = PathologicalSpace;
    let adv = PathoAdversary::new(k, &mut adversary_rng(c, r))?;
    let mut learner = MeanEstimator::new(space.clone(), learner_rng(c, r))?;
    let j = adv.comparator();
    let mut tr = ReplicaTrace::with_comparators(1, k as usize);
    for y in adv.responses() {
        let p: u64 = OnlineLearner::<(), _>::predict(&mut learner, &())?;
        OnlineLearner::<(), _>::observe(&mut learner, &y)?;
        tr.push(space.loss(&p, &y), &[space.loss(&j, &y)]);
    }
    Ok(tr)
}

fn c1nn_threshold(c: &ExperimentConfig, r: usize) -> Result<ReplicaTrace> {
    let delta: f64 = c.param("delta", 0.5)?;
    let space = FiniteLabels::new(2)?;
    let xs = uniform_instances(c, r)?;
    let mut learner = C1nn::<f64, usize>::new(delta, 0, learner_rng(c, r))?;
    let mut tr = ReplicaTrace::with_comparators(1, c.horizon);
    for x in xs {
        let y = usize::from(x > 0.5);
        let p = learner.predict(&x)?;
        learner.observe(&y)?;
        tr.push(space.loss(&p, &y), &[0.0]);
    }
    Ok(tr)
}

#[derive(Clone, Copy)]
enum Synthetic {
    Anti,
    Zero,
    Truth,
}

impl OnlineLearner<f64, f64> for Synthetic {
    fn predict(&mut self, x: &f64) -> Result<f64> {
        let truth = if *x > 0.5 { 1.0 } else { 0.0 };
        Ok(match self {
            Synthetic::Anti => 1.0 - truth,
            Synthetic::Zero => 0.0,
            Synthetic::Truth => truth,
        })
    }
    fn observe(&mut self, _y: &f64) -> Result<()> {
        Ok(())
    }
}

fn combiner_synthetic(c: &ExperimentConfig, r: usize) -> Result<ReplicaTrace> {
    let space = Interval::unit(1.0)?;
    let experts = [Synthetic::Anti, Synthetic::Zero, Synthetic::Truth];
    let factory = Box::new(move |i: usize| Ok(Box::new(experts[i]) as BoxedLearner<f64, f64>));
    let mut learner = Combiner::new(space.clone(), factory, learner_rng(c, r)).with_max_experts(3);
    let xs = uniform_instances(c, r)?;
    let mut tr = ReplicaTrace::with_comparators(3, c.horizon);
    for x in xs {
        let y = if x > 0.5 { 1.0 } else { 0.0 };
        let p = learner.predict(&x)?;
        learner.observe(&y)?;
        let mut comps = [0.0; 3];
        for (slot, e) in experts.iter().enumerate() {
            comps[slot] = space.loss(&e.clone().predict(&x)?, &y);
        }
        tr.push(space.loss(&p, &y), &comps);
    }
    Ok(tr)
}

/// Truncation selector whose levels run per-instance mean estimation.
fn truncation_learner(space: RealLine, seed: u64) -> TruncationSelector<f64, RealLine> {
    let level_space = space.clone();
    let factory = Box::new(move |m: usize| {
        let s = derive_seed(seed, "level", m as u64);
        Ok(Box::new(PerInstance::<f64, f64>::mean_estimation(
            level_space.clone(),
            s,
        )) as BoxedLearner<f64, f64>)
    });
    TruncationSelector::new(space, factory, child_rng(seed, "select", 0))
}

fn crf(c: &ExperimentConfig, r: usize) -> Result<ReplicaTrace> {
    let alpha: f64 = c.param("alpha", 1.0)?;
    let space = RealLine::new(alpha)?;
    let adv = CrfAdversary::new(alpha, c.horizon, &mut adversary_rng(c, r))?;
    let mut learner = truncation_learner(space.clone(), derive_seed(c.seed, "learner", r as u64));
    let mut tr = ReplicaTrace::with_comparators(2, c.horizon);
    for (x, y) in adv.instances().into_iter().zip(adv.responses()) {
        let p = learner.predict(&x)?;
        learner.observe(&y)?;
        tr.push(
            space.loss(&p, &y),
            &[space.loss(&adv.target(x), &y), space.loss(&0.0, &y)],
        );
    }
    Ok(tr)
}

/// Spikes of loss `2^k` at times `4^k`, zero elsewhere.
pub(crate) fn heavy_tail_response(t: usize, alpha: f64) -> f64 {
    let mut k = 0u32;
    let mut p = 1usize;
    while p < t {
        p = p.saturating_mul(4);
        k += 1;
    }
    if p == t && k >= 1 {
        2f64.powf(k as f64 / alpha)
    } else {
        0.0
    }
}

fn heavy_tail(c: &ExperimentConfig, r: usize) -> Result<ReplicaTrace> {
    let alpha: f64 = c.param("alpha", 1.0)?;
    let space = RealLine::new(alpha)?;
    let mut learner = truncation_learner(space.clone(), derive_seed(c.seed, "learner", r as u64));
    let mut tr = ReplicaTrace::with_comparators(1, c.horizon);
    for t in 1..=c.horizon {
        let y = heavy_tail_response(t, alpha);
        let p = learner.predict(&0.0)?;
        learner.observe(&y)?;
        tr.push(space.loss(&p, &y), &[space.loss(&0.0, &y)]);
    }
    Ok(tr)
}

fn cs_piecewise(c: &ExperimentConfig, r: usize) -> Result<ReplicaTrace> {
    let space = Interval::unit(1.0)?;
    let mut learner = CsLearner::new(space.clone(), Box::new(DyadicCells), learner_rng(c, r))?;
    let xs = uniform_instances(c, r)?;
    let mut tr = ReplicaTrace::with_comparators(2, c.horizon);
    for x in xs {
        let y = if x < 0.5 { 0.0 } else { 1.0 };
        let p = learner.predict(&x)?;
        learner.observe(&y)?;
        tr.push(space.loss(&p, &y), &[0.0, space.loss(&0.0, &y)]);
    }
    Ok(tr)
}

/// `space=line` asks for the learner on the real line, which has no nets.
fn feps_value_space(c: &ExperimentConfig, eps: f64) -> Result<Interval> {
    let mismatch = |e: Error| match e {
        Error::UnsupportedNet => {
            Error::ComponentMismatch("f^ε needs ε-nets but the real line is unbounded".into())
        }
        other => other,
    };
    match c.param("space", String::from("interval"))?.as_str() {
        "interval" => Interval::unit(1.0),
        "line" => {
            let line = RealLine::new(1.0)?;
            FEps::<f64, _>::new(line.clone(), eps, child_rng(0, "probe", 0)).map_err(mismatch)?;
            TotallyBoundedFtime::new(line, eps).map_err(mismatch)?;
            Err(Error::CorruptedState(
                "real line unexpectedly has an ε-net".into(),
            ))
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown value space `{other}`"
        ))),
    }
}

fn feps_interval(c: &ExperimentConfig, r: usize) -> Result<ReplicaTrace> {
    let eps: f64 = c.param("eps", 0.25)?;
    let space = feps_value_space(c, eps)?;
    let mut learner = FEps::<f64, _>::new(space.clone(), eps, learner_rng(c, r))?;
    let xs = uniform_instances(c, r)?;
    let mut tr = ReplicaTrace::with_comparators(1, c.horizon);
    for x in xs {
        let p = learner.predict(&x)?;
        learner.observe(&x)?;
        tr.push(space.loss(&p, &x), &[0.0]);
    }
    Ok(tr)
}

fn feps_block(c: &ExperimentConfig, r: usize) -> Result<ReplicaTrace> {
    let eps: f64 = c.param("eps", 0.25)?;
    let space = feps_value_space(c, eps)?;
    let ftime = TotallyBoundedFtime::new(space.clone(), eps)?;
    let mut learner = FEpsBlock::<f64, f64>::new(
        Box::new(ftime),
        eps,
        derive_seed(c.seed, "learner", r as u64),
    )?;
    let xs = uniform_instances(c, r)?;
    let mut tr = ReplicaTrace::with_comparators(1, c.horizon);
    for x in xs {
        let p = learner.predict(&x)?;
        learner.observe(&x)?;
        tr.push(space.loss(&p, &x), &[0.0]);
    }
    Ok(tr)
}
