//! Acceptance run: one PASS/FAIL line per criterion. Every expected value is
//! recomputed here from first principles and compared with the library.
//!
//! Floating-point slack of `1e-12` relative is allowed on inequalities that
//! are tight by construction (equality cases of the power-mean and relaxed
//! triangle bounds); it absorbs rounding only.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use uniregress::adversaries::{
    crf_spike_time, patho_comparator, patho_expected_loss, sign_mistake_dominance, superexp_beta,
    CrfAdversary, TriangleAdversary,
};
use uniregress::c1nn::C1nnIndex;
use uniregress::cluster::{certify_ftime, FtimeEstimator, TotallyBoundedFtime};
use uniregress::ewa::{GrowingHedge, Hedge};
use uniregress::harness::{run, scenario_names, verify, ExperimentConfig};
use uniregress::selector::{BoxedLearner, Combiner, SelectionReport};
use uniregress::spaces::{
    patho_loss, relaxed_triangle_constant, DiscreteMetric, Interval, ValueSpace,
};
use uniregress::{OnlineLearner, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Pathological space oracle, straight from the block construction.

fn oracle_n(k: u64) -> u64 {
    2 * k * (k - 1) + (1u64 << k) - 1
}

/// `(k, offset within I_k)` or `(k, bits of J_k)`, tagged by side.
fn oracle_locate(i: u64) -> Option<(u64, bool, u64)> {
    if i == 0 {
        return None;
    }
    let mut k = 1;
    while oracle_n(k + 1) <= i {
        k += 1;
    }
    let start_j = oracle_n(k) + 4 * k;
    Some(if i < start_j {
        (k, true, i - oracle_n(k))
    } else {
        (k, false, i - start_j)
    })
}

fn oracle_patho(i: u64, j: u64) -> f64 {
    if i == j {
        return 0.0;
    }
    match (oracle_locate(i), oracle_locate(j)) {
        (Some((ki, si, oi)), Some((kj, sj, oj))) if ki == kj && si != sj => {
            let (off, bits) = if si { (oi, oj) } else { (oj, oi) };
            let u = off / 4;
            let b = ((bits >> u) & 1) as f64;
            if off % 4 < 2 {
                (1.0 + b) / 2.0
            } else {
                (2.0 - b) / 2.0
            }
        }
        _ => 1.0,
    }
}

fn c01_patho_metric() -> Outcome {
    let start = Instant::now();
    let report = verify::verify("metric-axioms").expect("suite runs");
    let elapsed = start.elapsed().as_secs_f64();
    let n = 71u64;
    let mut mismatches = 0;
    let mut violations = 0;
    for i in 0..n {
        for j in 0..n {
            let d = oracle_patho(i, j);
            if d != patho_loss(i, j) {
                mismatches += 1;
            }
            if (d == 0.0) != (i == j) || d != oracle_patho(j, i) {
                violations += 1;
            }
            for m in 0..n {
                if d > oracle_patho(i, m) + oracle_patho(m, j) {
                    violations += 1;
                }
            }
        }
    }
    outcome(
        report.passed && report.violations == 0 && mismatches == 0 && violations == 0 && elapsed < 1.0 && oracle_n(5) == 71,
        format!(
            "suite {} checks / {} violations in {elapsed:.3}s; oracle {violations} violations, {mismatches} loss mismatches",
            report.checks, report.violations
        ),
    )
}

fn c02_patho_lower_bound() -> Outcome {
    let k = 3u64;
    let nk = oracle_n(k);
    let mut min_expected = f64::INFINITY;
    let mut lib_mismatch = 0;
    for y in 0..oracle_n(4) {
        for u in 0..k {
            let mut s = 0.0;
            for bc in 0..4 {
                s += oracle_patho(y, nk + 4 * u + bc);
            }
            let e = s / 4.0;
            if e != patho_expected_loss(3, u as u32 + 1, y) {
                lib_mismatch += 1;
            }
            min_expected = min_expected.min(e);
        }
    }
    let mut comparator_ok = true;
    for bits in 0..(1u64 << k) {
        let j = nk + 4 * k + bits;
        let lib_bits: Vec<bool> = (0..k).map(|u| (bits >> u) & 1 == 1).collect();
        comparator_ok &= patho_comparator(3, &lib_bits) == j;
        for u in 0..k {
            let b = (bits >> u) & 1;
            for c in 0..2 {
                comparator_ok &= oracle_patho(nk + 4 * u + 2 * b + c, j) == 0.5;
            }
        }
    }
    let out =
        run(&ExperimentConfig::new("patho-k3", 8, 2000, 11).with_param("k", 8)).expect("patho run");
    let last = out.trace.last().expect("rows");
    let t = last.t as f64;
    let mc_mean = last.learner_cum / t;
    let comp_mean = last.comparator_cum[0] / t;
    outcome(
        min_expected == 0.75 && comparator_ok && lib_mismatch == 0 && mc_mean >= 0.74 && comp_mean == 0.5,
        format!("min fixed expected loss {min_expected}, comparator exact 1/2: {comparator_ok}; k=8 MC mean {mc_mean:.4}, comparator {comp_mean}"),
    )
}

fn c03_hedge() -> Outcome {
    let horizon = 1000usize;
    let mut violations = 0;
    let mut max_dev: f64 = 0.0;
    for s in 0..100u64 {
        let n = [2usize, 4, 16][s as usize % 3];
        let mut r = rng(1000 + s);
        let eta = (8.0 * (n as f64).ln() / horizon as f64).sqrt();
        let mut lib = Hedge::new(n, Hedge::optimal_rate(n, horizon, 1.0)).unwrap();
        let mut cum = vec![0.0f64; n];
        let mut total = 0.0;
        let mut lib_total = 0.0;
        for _ in 0..horizon {
            let losses: Vec<f64> = (0..n)
                .map(|_| {
                    if r.gen_bool(0.3) {
                        r.gen::<f64>()
                    } else {
                        f64::from(r.gen::<bool>())
                    }
                })
                .collect();
            let w: Vec<f64> = cum.iter().map(|l| (-eta * l).exp()).collect();
            let z: f64 = w.iter().sum();
            total += w.iter().zip(&losses).map(|(w, l)| w * l).sum::<f64>() / z;
            for (c, l) in cum.iter_mut().zip(&losses) {
                *c += l;
            }
            lib_total += lib.update(&losses).unwrap();
        }
        max_dev = max_dev.max((total - lib_total).abs());
        let best = cum.iter().copied().fold(f64::INFINITY, f64::min);
        let bound = best + (n as f64).ln() / eta + horizon as f64 * eta / 8.0;
        if total > bound || lib_total > bound {
            violations += 1;
        }
    }
    outcome(
        violations == 0 && max_dev < 1e-9,
        format!("{violations} violations over 100 sequences; |oracle - lib| <= {max_dev:.2e}"),
    )
}

fn c04_growing_hedge() -> Outcome {
    let mut violations = 0;
    let mut max_dev: f64 = 0.0;
    let mut min_margin = f64::INFINITY;
    for s in 0..100u64 {
        let t0 = [10usize, 100, 1000][s as usize % 3];
        let mut r = rng(2000 + s);
        let eta = (2.0 * (t0 as f64).ln() / t0 as f64).sqrt();
        let alphabet = 1 + r.gen_range(0..12);
        let favourite = r.gen_range(0..alphabet);
        let mut lib = GrowingHedge::new(t0).unwrap();
        let mut seen: Vec<(usize, u64)> = Vec::new();
        let mut success = 0.0;
        for _ in 0..t0 {
            let y = if r.gen_bool(0.4) {
                favourite
            } else {
                r.gen_range(0..alphabet)
            };
            let p = if seen.is_empty() {
                f64::from(u8::from(y == 0))
            } else {
                let z: f64 = seen.iter().map(|(_, c)| (eta * *c as f64).exp()).sum();
                seen.iter()
                    .find(|(l, _)| *l == y)
                    .map_or(0.0, |(_, c)| (eta * *c as f64).exp() / z)
            };
            max_dev = max_dev.max((p - lib.probability(y)).abs());
            success += p;
            lib.observe(y);
            match seen.iter_mut().find(|(l, _)| *l == y) {
                Some(e) => e.1 += 1,
                None => seen.push((y, 1)),
            }
        }
        let best = seen.iter().map(|(_, c)| *c).max().unwrap_or(0) as f64;
        let t0f = t0 as f64;
        let bound = best
            - 1.0
            - 2f64.ln() * (t0f / (2.0 * t0f.ln())).sqrt()
            - (t0f.ln() / (2.0 * t0f)).sqrt() * (2.0 * t0f);
        min_margin = min_margin.min(success - bound);
        if success < bound {
            violations += 1;
        }
    }
    outcome(
        violations == 0 && max_dev < 1e-12,
        format!("{violations} violations over 100 sequences; min margin {min_margin:.3}; |oracle - lib| <= {max_dev:.1e}"),
    )
}

fn c05_triangle() -> Outcome {
    let start = Instant::now();
    let v = TriangleAdversary::vertices();
    let d = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
    let oracle_vertex = (d(v[0], v[0]) + d(v[0], v[1]) + d(v[0], v[2])) / 3.0;
    let closed = 2.0 * 3f64.sqrt() / 3.0;
    let constant_ok = (oracle_vertex - closed).abs() < 1e-12
        && (TriangleAdversary::vertex_expected_loss() - closed).abs() < 1e-12;

    let seeds = 20;
    let out = run(&ExperimentConfig::new(
        "triangle-mean-est",
        10_000,
        seeds,
        7,
    ))
    .expect("triangle run");
    let learner_max = out.replica_learner_avg.iter().copied().fold(0.0, f64::max);
    let learner_mean = out.replica_learner_avg.iter().sum::<f64>() / seeds as f64;
    let centre_exact = out
        .trace
        .rows
        .iter()
        .all(|r| r.comparator_cum[0] == r.t as f64);

    // memorization baselines replayed on the scenario's own response streams
    let mut baseline = [0.0f64; 3];
    for r in 0..seeds {
        let mut adv = TriangleAdversary::new(uniregress::seed::child_rng(7, "adversary", r as u64));
        let (mut first, mut last) = (None::<usize>, None::<usize>);
        let mut counts = [0usize; 3];
        let mut sums = [0.0; 3];
        for _ in 0..10_000 {
            let preds = [
                last.unwrap_or(0),
                first.unwrap_or(0),
                (0..3)
                    .max_by_key(|&i| (counts[i], std::cmp::Reverse(i)))
                    .unwrap_or(0),
            ];
            let y = adv.next_vertex();
            for (s, p) in sums.iter_mut().zip(preds) {
                *s += d(v[p], v[y]);
            }
            first.get_or_insert(y);
            last = Some(y);
            counts[y] += 1;
        }
        for (b, s) in baseline.iter_mut().zip(sums) {
            *b += s / 10_000.0 / seeds as f64;
        }
    }
    let baseline_min = baseline.iter().copied().fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        constant_ok && centre_exact && learner_max <= 1.08 && baseline_min >= 1.13 && elapsed < 10.0,
        format!(
            "vertex loss {oracle_vertex:.15}; learner mean {learner_mean:.4}, worst seed {learner_max:.4}; baselines {:.4}/{:.4}/{:.4}; {elapsed:.2}s",
            baseline[0], baseline[1], baseline[2]
        ),
    )
}

fn c06_loss_identities() -> Outcome {
    let report = verify::verify("loss-identities").expect("suite runs");
    let mut r = rng(6);
    let mut violations = 0;
    let mut max_rel: f64 = 0.0;
    for _ in 0..10_000 {
        let a: f64 = r.gen_range(0.0..5.0);
        let b: f64 = if r.gen_bool(0.1) {
            a
        } else {
            r.gen_range(0.0..5.0)
        };
        let alpha: f64 = r.gen_range(1.0..5.0);
        let eps: f64 = r.gen_range(1e-3..=1.0);
        let c = (1.0 + 1.0 / ((1.0 + eps).powf(1.0 / alpha) - 1.0)).powf(alpha);
        let lib = relaxed_triangle_constant(alpha, eps).unwrap();
        max_rel = max_rel.max(((lib - c) / c).abs());
        let lhs = (a + b).powf(alpha);
        let slack = 1e-12 * lhs;
        if lhs > 2f64.powf(alpha - 1.0) * (a.powf(alpha) + b.powf(alpha)) + slack {
            violations += 1;
        }
        if lhs > (1.0 + eps) * a.powf(alpha) + c * b.powf(alpha) + slack {
            violations += 1;
        }
        if c > (4.0 * alpha / eps).powf(alpha) {
            violations += 1;
        }
    }
    outcome(
        report.passed && violations == 0 && max_rel < 1e-12,
        format!("suite {} checks / {} violations; oracle {violations} violations; constant rel. dev {max_rel:.1e}", report.checks, report.violations),
    )
}

/// Plain 2C1NN: a one-child candidate is always taken and leaves the dataset.
fn oracle_2c1nn(xs: &[f64]) -> Vec<Option<usize>> {
    let mut dataset: Vec<usize> = Vec::new();
    let mut children: Vec<u8> = Vec::new();
    let mut parents = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        let t = i + 1;
        children.push(0);
        if xs[..i].iter().any(|&p| p.to_bits() == x.to_bits()) {
            parents.push(None);
            continue;
        }
        if t == 1 {
            dataset.push(t);
            parents.push(None);
            continue;
        }
        let mut best = 0;
        for (pos, &u) in dataset.iter().enumerate() {
            if (xs[u - 1] - x).abs() < (xs[dataset[best] - 1] - x).abs() {
                best = pos;
            }
        }
        let u = dataset[best];
        children[u - 1] += 1;
        if children[u - 1] == 2 {
            dataset.remove(best);
        }
        dataset.push(t);
        parents.push(Some(u));
    }
    parents
}

fn c07_c1nn_invariants() -> Outcome {
    let report = verify::verify("c1nn-invariants").expect("suite runs");
    let mut replay_mismatch = 0;
    for s in 0..10u64 {
        let mut r = rng(7000 + s);
        let pool: Vec<f64> = (0..30).map(|_| r.gen()).collect();
        let xs: Vec<f64> = (0..5000)
            .map(|_| {
                if r.gen_bool(0.1) {
                    pool[r.gen_range(0..30)]
                } else {
                    r.gen()
                }
            })
            .collect();
        let mut idx = C1nnIndex::<f64>::new(1.0, rng(s)).unwrap();
        for &x in &xs {
            idx.insert(x).unwrap();
        }
        let oracle = oracle_2c1nn(&xs);
        replay_mismatch += (1..=xs.len())
            .filter(|&t| idx.parent(t) != oracle[t - 1])
            .count();
        replay_mismatch += idx.removals().iter().filter(|rm| !rm.revealed).count();
    }
    outcome(
        report.passed && replay_mismatch == 0,
        format!(
            "suite {} checks / {} violations over 50 runs; δ=1 replay mismatches {replay_mismatch}",
            report.checks, report.violations
        ),
    )
}

fn c08_smoke() -> Outcome {
    let out = run(&ExperimentConfig::new("c1nn-threshold", 20_000, 10, 8).with_param("delta", 0.5))
        .expect("c1nn run");
    let mut v = out.replica_learner_avg.clone();
    v.sort_by(f64::total_cmp);
    let median = (v[4] + v[5]) / 2.0;
    outcome(
        median <= 0.05,
        format!("median average 0-1 loss {median:.5} over 10 seeds"),
    )
}

#[derive(Clone, Copy)]
enum Synth {
    Anti,
    Zero,
    Truth,
}

impl Synth {
    fn value(self, x: f64) -> f64 {
        let truth = f64::from(u8::from(x > 0.5));
        match self {
            Synth::Anti => 1.0 - truth,
            Synth::Zero => 0.0,
            Synth::Truth => truth,
        }
    }
}

impl OnlineLearner<f64, f64> for Synth {
    fn predict(&mut self, x: &f64) -> Result<f64> {
        Ok(self.value(*x))
    }
    fn observe(&mut self, _y: &f64) -> Result<()> {
        Ok(())
    }
}

fn c09_combiner() -> Outcome {
    let experts = [Synth::Anti, Synth::Zero, Synth::Truth];
    let space = Interval::unit(1.0).unwrap();
    let lbar = 1.0;
    let entry: Vec<usize> = (0..3).map(|i| (i as f64).exp().ceil() as usize).collect();
    let mut exact_violations = 0;
    let mut sampled_ok_seeds = 0;
    let mut max_dev: f64 = 0.0;
    for s in 0..100u64 {
        let factory = Box::new(move |i: usize| Ok(Box::new(experts[i]) as BoxedLearner<f64, f64>));
        let mut c = Combiner::new(space.clone(), factory, rng(9000 + s)).with_max_experts(3);
        let mut r = rng(90_000 + s);
        let mut lhat = [0.0f64; 3];
        let mut big_l = [0.0f64; 3];
        let mut sampled = [0.0f64; 3];
        let mut sampled_ok = true;
        for t in 1..=5000usize {
            let x: f64 = r.gen();
            let y = f64::from(u8::from(x > 0.5));
            let p = c.predict(&x).unwrap();
            let probs = c.last_probabilities().to_vec();
            c.observe(&y).unwrap();
            let losses: Vec<f64> = experts
                .iter()
                .map(|e| space.loss(&e.value(x), &y))
                .collect();
            let step_hat: f64 = probs.iter().zip(&losses).map(|(p, l)| p * l).sum();
            let realised = space.loss(&p, &y);
            for i in 0..3 {
                if t >= entry[i] {
                    lhat[i] += step_hat;
                    big_l[i] += losses[i];
                    sampled[i] += realised;
                }
            }
            let agg = c.aggregator();
            for i in 0..agg.len() {
                max_dev = max_dev
                    .max((agg.estimated_loss(i) - lhat[i]).abs())
                    .max((agg.true_loss(i) - big_l[i]).abs());
            }
            if t >= 32 {
                let root = ((t as f64) * (t as f64).ln()).sqrt();
                for i in 0..3 {
                    if lhat[i] - big_l[i] > (1.5 + lbar * lbar) * root {
                        exact_violations += 1;
                    }
                    if sampled[i] - big_l[i] > (2.0 + lbar + lbar * lbar) * root {
                        sampled_ok = false;
                    }
                }
            }
        }
        sampled_ok_seeds += usize::from(sampled_ok);
    }
    outcome(
        exact_violations == 0 && sampled_ok_seeds >= 95 && max_dev < 1e-9,
        format!("{exact_violations} expected-loss violations; sampled bound held on {sampled_ok_seeds}/100 seeds; |oracle - lib| <= {max_dev:.1e}"),
    )
}

fn c10_superexp() -> Outcome {
    let mut all = true;
    let mut lines = Vec::new();
    for alpha in [1.5f64, 2.0] {
        let beta = 2.0 * alpha / (alpha - 1.0);
        all &= superexp_beta(alpha).unwrap() == beta;
        for horizon in 3u32..=6 {
            let d = sign_mistake_dominance(alpha, horizon).unwrap();
            let big = beta.powi(horizon as i32);
            // |y|^α - (|y|-1)^α >= α (|y|-1)^{α-1}
            let gap_lower = alpha.log2() + (alpha - 1.0) * (big - 1.0);
            // T Σ_{t<T} (1 + 2^{β^t})^α <= T (T-1) 2^{α(1+β^{T-1})}
            let prior_upper = (horizon as f64).log2()
                + ((horizon - 1) as f64).log2()
                + alpha * (1.0 + beta.powi(horizon as i32 - 1));
            all &= d.holds()
                && gap_lower > prior_upper
                && d.log2_gap >= gap_lower - 1e-9
                && d.log2_prior <= prior_upper + 1e-9;
        }
        lines.push(format!("α={alpha}: β={beta}"));
    }
    outcome(
        all,
        format!("{}; dominance holds for T=3..6", lines.join(", ")),
    )
}

/// Independent exhaustive search: Hedge at the bound-optimal rate over the
/// whole 3-point space.
fn oracle_ftime(points: &[f64], eta: f64) -> (usize, f64) {
    let n = points.len();
    let horizon = (2.0 * (n as f64).ln() / (eta * eta)).ceil() as usize;
    let rate = (8.0 * (n as f64).ln() / horizon as f64).sqrt();
    let loss: Vec<Vec<f64>> = points
        .iter()
        .map(|a| points.iter().map(|b| (a - b).abs()).collect())
        .collect();
    fn dfs(
        loss: &[Vec<f64>],
        rate: f64,
        left: usize,
        cum: &mut Vec<f64>,
        learner: f64,
        worst: &mut f64,
    ) {
        if left == 0 {
            let best = cum.iter().copied().fold(f64::INFINITY, f64::min);
            *worst = worst.max(learner - best);
            return;
        }
        let w: Vec<f64> = cum.iter().map(|c| (-rate * c).exp()).collect();
        let z: f64 = w.iter().sum();
        for y in 0..loss.len() {
            let e: f64 = w
                .iter()
                .enumerate()
                .map(|(i, w)| w * loss[i][y])
                .sum::<f64>()
                / z;
            for i in 0..cum.len() {
                cum[i] += loss[i][y];
            }
            dfs(loss, rate, left - 1, cum, learner + e, worst);
            for i in 0..cum.len() {
                cum[i] -= loss[i][y];
            }
        }
    }
    let mut worst = f64::NEG_INFINITY;
    dfs(&loss, rate, horizon, &mut vec![0.0; n], 0.0, &mut worst);
    (horizon, worst / horizon as f64)
}

fn c11_ftime() -> Outcome {
    let start = Instant::now();
    let points = [0.0, 0.5, 1.0];
    let space = DiscreteMetric::from_line(&points, 1.0).unwrap();
    let f = TotallyBoundedFtime::new(space, 0.4).unwrap();
    let lib = certify_ftime(&f, &[0, 1, 2]);
    let (horizon, oracle) = oracle_ftime(&points, 0.4);
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        f.net().len() == 3 && f.horizon() == horizon && (lib - oracle).abs() < 1e-9 && oracle <= 0.4 && elapsed < 60.0,
        format!("T_η = {horizon}, worst average excess {oracle:.4} (lib {lib:.4}) <= 0.4; {elapsed:.2}s"),
    )
}

fn c12_crf() -> Outcome {
    let mut ok = (1..=40u32).all(|k| crf_spike_time(k) == (1u64 << (k + 1)) - 2);
    let horizon = 5000;
    let mut worst_ratio: f64 = 0.0;
    for s in 0..50u64 {
        let adv = CrfAdversary::new(1.0, horizon, &mut rng(12_000 + s)).unwrap();
        let expected: Vec<usize> = (1..)
            .map(|k| (1usize << (k + 1)) - 2)
            .take_while(|t| *t <= horizon)
            .collect();
        ok &= adv.spike_times()[1..] == expected[..];
        ok &= (1..expected.len()).all(|k| adv.spike_value(k) == (1u64 << k) as f64);
        let ys = adv.responses();
        let mut sum = 0.0;
        for (i, y) in ys.iter().enumerate() {
            let t = (i + 1) as f64;
            sum += y.abs();
            worst_ratio = worst_ratio.max(sum / t - (t + 1.0) / t);
        }
    }
    ok &= worst_ratio <= 0.0;
    // two equally likely outcomes at a fresh spike: y_0 = 0 or y_k = 2^k
    let mut spike_ok = true;
    for k in 1..=12u32 {
        let yk = (1u64 << k) as f64;
        let min = (0..=4000)
            .map(|i| -1.0 + (yk + 2.0) * i as f64 / 4000.0)
            .map(|p| 0.5 * (p.abs() + (p - yk).abs()))
            .fold(f64::INFINITY, f64::min);
        spike_ok &= min >= yk / 2.0 - 1e-9;
    }
    outcome(
        ok && spike_ok,
        format!("spike times 2^(k+1)-2 match; max first-moment excess over (T+1)/T: {worst_ratio:.3}; per-spike floor held: {spike_ok}"),
    )
}

fn c13_determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut mismatched = Vec::new();
    for name in scenario_names() {
        let cfg = ExperimentConfig::new(name, 300, 3, 13);
        let a = run(&cfg).expect("run");
        let b = run(&cfg).expect("run");
        let pa = dir.path().join(format!("{name}-a.csv"));
        let pb = dir.path().join(format!("{name}-b.csv"));
        a.write(&pa).expect("write");
        b.write(&pb).expect("write");
        if a.csv != b.csv || std::fs::read(&pa).unwrap() != std::fs::read(&pb).unwrap() {
            mismatched.push(name);
        }
    }
    outcome(
        mismatched.is_empty(),
        format!(
            "{} scenarios, mismatched: {mismatched:?}",
            scenario_names().len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("pathological metric axioms", c01_patho_metric),
        ("pathological lower-bound mechanism", c02_patho_lower_bound),
        ("finite Hedge regret inequality", c03_hedge),
        ("growing-expert forecaster bound", c04_growing_hedge),
        ("triangle scenario", c05_triangle),
        ("loss identities", c06_loss_identities),
        ("C1NN structural invariants", c07_c1nn_invariants),
        ("noiseless C1NN smoke consistency", c08_smoke),
        ("combiner pathwise inequality", c09_combiner),
        ("super-exponential adversary", c10_superexp),
        ("F-TiME certification", c11_ftime),
        ("CRF bookkeeping", c12_crf),
        ("determinism", c13_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {:>2}. {name}: {} [{:.2}s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {}/{} passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
