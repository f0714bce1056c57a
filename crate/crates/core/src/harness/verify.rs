//! Oracle suites run by `verify --suite NAME`. Failures are report content,
//! each carrying the offending values.

use rand::Rng;
use serde::Serialize;

use crate::c1nn::{Arrival, C1nnIndex};
use crate::cluster::{certify_ftime, FtimeEstimator, TotallyBoundedFtime};
use crate::error::{Error, Result};
use crate::ewa::{hedge_regret_bound, GrowingHedge, Hedge};
use crate::seed::child_rng;
use crate::spaces::{patho_loss, patho_n, relaxed_triangle_constant, DiscreteMetric};

pub const SUITES: &[&str] = &[
    "metric-axioms",
    "hedge-bounds",
    "loss-identities",
    "c1nn-invariants",
    "ftime-certify",
];

/// Failures kept verbatim in a report; the count is always exact.
const MAX_REPORTED: usize = 20;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: u64,
    pub violations: u64,
    pub failures: Vec<String>,
}

struct Tally {
    checks: u64,
    violations: u64,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            checks: 0,
            violations: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.failures.len() < MAX_REPORTED {
                self.failures.push(describe());
            }
        }
    }

    fn finish(self, suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            passed: self.violations == 0,
            checks: self.checks,
            violations: self.violations,
            failures: self.failures,
        }
    }
}

pub fn verify(suite: &str) -> Result<SuiteReport> {
    let tally = match suite {
        "metric-axioms" => metric_axioms(),
        "hedge-bounds" => hedge_bounds()?,
        "loss-identities" => loss_identities()?,
        "c1nn-invariants" => c1nn_invariants()?,
        "ftime-certify" => ftime_certify()?,
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(tally.finish(suite))
}

/// Exhaustive triples on the pathological space below `n_5 = 71`.
fn metric_axioms() -> Tally {
    let n = patho_n(5);
    let mut t = Tally::new();
    let d: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| patho_loss(i, j)).collect())
        .collect();
    for i in 0..n as usize {
        for j in 0..n as usize {
            let dij = d[i][j];
            t.check((dij == 0.0) == (i == j), || {
                format!("identity: d({i},{j}) = {dij}")
            });
            t.check(dij == d[j][i], || {
                format!("symmetry: d({i},{j}) = {dij}, d({j},{i}) = {}", d[j][i])
            });
            for m in 0..n as usize {
                let rhs = d[i][m] + d[m][j];
                t.check(dij <= rhs, || {
                    format!("triangle: d({i},{j}) = {dij} > d({i},{m}) + d({m},{j}) = {rhs}")
                });
            }
        }
    }
    t
}

fn hedge_bounds() -> Result<Tally> {
    let mut t = Tally::new();
    let horizon = 1000;
    for s in 0..100u64 {
        let n = [2, 4, 16][s as usize % 3];
        let mut rng = child_rng(0, "hedge-bounds", s);
        let eta = Hedge::optimal_rate(n, horizon, 1.0);
        let mut h = Hedge::new(n, eta)?;
        let mut total = 0.0;
        for _ in 0..horizon {
            let losses: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            total += h.update(&losses)?;
        }
        let best = h
            .cumulative_losses()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let bound = hedge_regret_bound(best, n, eta, horizon, 1.0);
        t.check(total <= bound, || {
            format!("hedge seq {s} (N={n}): Σℓ̂ = {total} > {bound}")
        });
    }
    for s in 0..100u64 {
        let t0 = [10, 100, 1000][s as usize % 3];
        let mut rng = child_rng(0, "growing-hedge", s);
        let labels = 2 + rng.gen_range(0..6);
        let mut g = GrowingHedge::new(t0)?;
        let mut counts = vec![0u64; labels];
        let mut success = 0.0;
        for _ in 0..t0 {
            // skewed toward label 0 so a best expert exists
            let y = if rng.gen_bool(0.5) {
                0
            } else {
                rng.gen_range(0..labels)
            };
            success += g.probability(y);
            g.observe(y);
            counts[y] += 1;
        }
        let best = *counts.iter().max().unwrap_or(&0);
        let bound = GrowingHedge::success_lower_bound(t0, t0, best);
        t.check(success >= bound, || {
            format!("growing hedge seq {s} (t0={t0}): Σŝ = {success} < {bound}")
        });
    }
    Ok(t)
}

fn loss_identities() -> Result<Tally> {
    let mut t = Tally::new();
    let mut rng = child_rng(0, "loss-identities", 0);
    for _ in 0..10_000 {
        let a: f64 = rng.gen_range(0.0..10.0);
        let b: f64 = rng.gen_range(0.0..10.0);
        let alpha: f64 = rng.gen_range(1.0..4.0);
        let eps: f64 = 1.0 - rng.gen::<f64>();
        let lhs = (a + b).powf(alpha);
        let slack = 1e-9 * lhs.max(1.0);
        let convex = 2f64.powf(alpha - 1.0) * (a.powf(alpha) + b.powf(alpha));
        t.check(lhs <= convex + slack, || {
            format!("power mean: a={a} b={b} α={alpha}: {lhs} > {convex}")
        });
        let c = relaxed_triangle_constant(alpha, eps)?;
        let relaxed = (1.0 + eps) * a.powf(alpha) + c * b.powf(alpha);
        t.check(lhs <= relaxed + slack, || {
            format!("relaxed: a={a} b={b} α={alpha} ε={eps}: {lhs} > {relaxed}")
        });
        let cap = (4.0 * alpha / eps).powf(alpha);
        t.check(c <= cap, || {
            format!("constant: α={alpha} ε={eps}: c={c} > {cap}")
        });
    }
    Ok(t)
}

fn c1nn_invariants() -> Result<Tally> {
    let mut t = Tally::new();
    let horizon = 5000;
    for run in 0..50u64 {
        let delta = [0.1, 0.5, 1.0][run as usize % 3];
        let mut idx = C1nnIndex::<f64>::new(delta, child_rng(run, "learner", 0))?;
        let mut rng = child_rng(run, "process", 0);
        // a small pool makes repeats common
        let pool: Vec<f64> = (0..64).map(|_| rng.gen::<f64>()).collect();
        for step in 1..=horizon {
            let x = if rng.gen_bool(0.2) {
                pool[rng.gen_range(0..pool.len())]
            } else {
                rng.gen::<f64>()
            };
            match idx.insert(x)? {
                Arrival::Duplicate { of } => {
                    t.check(
                        idx.parent(step).is_none()
                            && idx.depth(step) == idx.depth(of)
                            && !idx.in_dataset(step),
                        || format!("run {run}: repeat at {step} of {of} not memorized"),
                    );
                }
                Arrival::New { parent } => {
                    t.check(idx.depth(step) == idx.depth(parent) + 1, || {
                        format!("run {run}: depth at {step}")
                    });
                }
                Arrival::First => {}
            }
        }
        for u in 1..=horizon {
            let c = idx.children(u);
            t.check(c <= 2, || format!("run {run}: {u} has {c} children"));
            if c == 2 {
                t.check(idx.revealed(u) == Some(true), || {
                    format!(
                        "run {run}: {u} has two children but bit {:?}",
                        idx.revealed(u)
                    )
                });
            }
        }
        for r in idx.removals() {
            let ok = match r.children {
                1 => !r.revealed,
                2 => r.revealed,
                _ => false,
            };
            t.check(ok && !idx.in_dataset(r.time), || {
                format!("run {run}: bad removal {r:?}")
            });
        }
    }
    Ok(t)
}

/// Three equally spaced points on `[0,1]` at tolerance 0.4.
fn ftime_certify() -> Result<Tally> {
    let mut t = Tally::new();
    let space = DiscreteMetric::from_line(&[0.0, 0.5, 1.0], 1.0)?;
    let ftime = TotallyBoundedFtime::new(space, 0.4)?;
    let worst = certify_ftime(&ftime, &[0, 1, 2]);
    t.check(worst <= ftime.tolerance(), || {
        format!(
            "horizon {}: worst average excess {worst} > {}",
            ftime.horizon(),
            ftime.tolerance()
        )
    });
    Ok(t)
}
