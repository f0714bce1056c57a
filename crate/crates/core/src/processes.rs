//! Instance processes on the real line and finite-horizon diagnostics for
//! the visit conditions. Reports are evidence at a horizon, not verdicts.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seed::child_rng;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ProcessKind {
    /// I.i.d. uniform on `[lo, hi)`.
    IidUniform {
        lo: f64,
        hi: f64,
    },
    /// I.i.d. uniform over a finite point set.
    FiniteSupport {
        points: Vec<f64>,
    },
    /// Point `k` at `t_k = 2^{k+1} - 2`, the base point 0 elsewhere.
    SparseNovelty,
    Constant {
        value: f64,
    },
    /// Bursts in `B_p = [2^-p, 2^{-p+1})` for an `eps` fraction of each
    /// doubling window, base point 1 elsewhere.
    Bursty {
        eps: f64,
        first_window: usize,
    },
    /// A fresh point every step.
    Fresh,
}

impl ProcessKind {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "iid_uniform" | "iid-uniform" => ProcessKind::IidUniform { lo: 0.0, hi: 1.0 },
            "finite_support" | "finite-support" => ProcessKind::FiniteSupport {
                points: vec![0.1, 0.5, 0.9],
            },
            "sparse_novelty" | "sparse-novelty" => ProcessKind::SparseNovelty,
            "constant" => ProcessKind::Constant { value: 0.5 },
            "bursty" => ProcessKind::Bursty {
                eps: 0.2,
                first_window: 8,
            },
            "fresh" => ProcessKind::Fresh,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown process `{other}`"
                )))
            }
        })
    }
}

#[derive(Clone, Debug)]
pub struct InstanceProcess {
    kind: ProcessKind,
    rng: ChaCha8Rng,
    t: usize,
    next_novelty: (usize, usize),
    window: (usize, usize),
}

pub fn make_process(kind: ProcessKind, rng: ChaCha8Rng) -> Result<InstanceProcess> {
    match &kind {
        ProcessKind::IidUniform { lo, hi } if !(lo < hi) => {
            return Err(Error::InvalidParameter(format!("empty range [{lo}, {hi})")))
        }
        ProcessKind::FiniteSupport { points } if points.is_empty() => {
            return Err(Error::InvalidParameter(
                "finite support needs at least one point".into(),
            ))
        }
        ProcessKind::Bursty { eps, first_window }
            if !(*eps > 0.0 && *eps < 1.0) || *first_window < 4 =>
        {
            return Err(Error::InvalidParameter(
                "bursty needs eps in (0,1) and a first window >= 4".into(),
            ))
        }
        _ => {}
    }
    let window = match &kind {
        ProcessKind::Bursty { first_window, .. } => (*first_window, 1),
        _ => (0, 0),
    };
    Ok(InstanceProcess {
        kind,
        rng,
        t: 0,
        next_novelty: (1, 2),
        window,
    })
}

impl InstanceProcess {
    pub fn kind(&self) -> &ProcessKind {
        &self.kind
    }

    pub fn next_instance(&mut self) -> f64 {
        self.t += 1;
        let t = self.t;
        match &self.kind {
            ProcessKind::IidUniform { lo, hi } => self.rng.gen_range(*lo..*hi),
            ProcessKind::FiniteSupport { points } => points[self.rng.gen_range(0..points.len())],
            ProcessKind::SparseNovelty => {
                let (k, tk) = self.next_novelty;
                if t == tk {
                    self.next_novelty = (k + 1, (1usize << (k + 2)) - 2);
                    k as f64
                } else {
                    0.0
                }
            }
            ProcessKind::Constant { value } => *value,
            ProcessKind::Bursty { eps, .. } => {
                // window p covers (start, 2 start]
                let (start, p) = self.window;
                if t > 2 * start {
                    self.window = (2 * start, p + 1);
                }
                let (start, p) = self.window;
                let burst = (eps * start as f64).ceil() as usize;
                if t > start && t <= start + burst {
                    let lo = 2f64.powi(-(p as i32));
                    self.rng.gen_range(lo..2.0 * lo)
                } else {
                    1.0
                }
            }
            ProcessKind::Fresh => t as f64,
        }
    }

    pub fn take(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_instance()).collect()
    }
}

/// Total assignment of instances to part labels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Partition {
    /// `[j 2^-d, (j+1) 2^-d)` on `[0,1)`, values outside clamped to the end parts.
    Dyadic { depth: u32 },
    /// Every point its own part.
    Singleton,
}

impl Partition {
    pub fn parse(name: &str) -> Result<Self> {
        if name == "singleton" {
            return Ok(Partition::Singleton);
        }
        if let Some(d) = name.strip_prefix("dyadic") {
            let depth = d
                .trim_start_matches([':', '-', '_'])
                .parse::<u32>()
                .unwrap_or(8);
            if depth > 40 {
                return Err(Error::InvalidParameter(format!(
                    "dyadic depth {depth} too large"
                )));
            }
            return Ok(Partition::Dyadic { depth });
        }
        Err(Error::InvalidParameter(format!(
            "unknown partition `{name}`"
        )))
    }

    pub fn part(&self, x: f64) -> u64 {
        match self {
            Partition::Dyadic { depth } => {
                let n = 1u64 << depth;
                let j = (x * n as f64).floor();
                j.clamp(0.0, (n - 1) as f64) as u64
            }
            Partition::Singleton => x.to_bits(),
        }
    }
}

/// Distinct parts visited by each horizon prefix.
pub fn smv_diagnostic(instances: &[f64], partition: &Partition, horizons: &[usize]) -> Vec<usize> {
    let mut seen = HashSet::new();
    let mut sorted: Vec<(usize, usize)> = horizons
        .iter()
        .copied()
        .enumerate()
        .map(|(i, h)| (h, i))
        .collect();
    sorted.sort();
    let mut result = vec![0; horizons.len()];
    let mut t = 0;
    for (h, i) in sorted {
        while t < h.min(instances.len()) {
            seen.insert(partition.part(instances[t]));
            t += 1;
        }
        result[i] = seen.len();
    }
    result
}

/// Largest running frequency of `member` over `t ∈ [T/2, T]`.
pub fn tail_window_frequency(instances: &[f64], member: impl Fn(f64) -> bool) -> f64 {
    let n = instances.len();
    if n == 0 {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut best: f64 = 0.0;
    for (i, x) in instances.iter().enumerate() {
        if member(*x) {
            hits += 1;
        }
        let t = i + 1;
        if 2 * t >= n {
            best = best.max(hits as f64 / t as f64);
        }
    }
    best
}

/// Mean over replicas of the tail-window frequency of each set `A_k`.
pub fn cs_diagnostic<F>(
    kind: &ProcessKind,
    sets: F,
    ks: &[u32],
    horizon: usize,
    replicas: usize,
    seed: u64,
) -> Result<Vec<f64>>
where
    F: Fn(u32, f64) -> bool + Sync,
{
    let per_replica: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|r| -> Result<Vec<f64>> {
            let mut p = make_process(kind.clone(), child_rng(seed, "process", r as u64))?;
            let xs = p.take(horizon);
            Ok(ks
                .iter()
                .map(|&k| tail_window_frequency(&xs, |x| sets(k, x)))
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut mean = vec![0.0; ks.len()];
    for row in &per_replica {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= replicas.max(1) as f64;
    }
    Ok(mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn rng(s: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(s)
    }

    #[test]
    fn finite_support_counts() {
        let mut p = make_process(
            ProcessKind::FiniteSupport {
                points: vec![1.0, 2.0, 3.0],
            },
            rng(0),
        )
        .unwrap();
        let xs = p.take(500);
        assert_eq!(
            smv_diagnostic(&xs, &Partition::Singleton, &[100, 500]),
            vec![3, 3]
        );
    }

    #[test]
    fn sparse_novelty_schedule() {
        let mut p = make_process(ProcessKind::SparseNovelty, rng(0)).unwrap();
        let xs = p.take(62);
        let novel: Vec<usize> = xs
            .iter()
            .enumerate()
            .filter(|(_, x)| **x != 0.0)
            .map(|(i, _)| i + 1)
            .collect();
        assert_eq!(novel, vec![2, 6, 14, 30, 62]);
        assert_eq!(smv_diagnostic(&xs, &Partition::Singleton, &[62]), vec![6]);
    }

    #[test]
    fn constant_and_fresh_extremes() {
        let mut c = make_process(ProcessKind::Constant { value: 0.3 }, rng(0)).unwrap();
        assert_eq!(
            smv_diagnostic(&c.take(100), &Partition::Singleton, &[1, 10, 100]),
            vec![1, 1, 1]
        );
        let mut f = make_process(ProcessKind::Fresh, rng(0)).unwrap();
        assert_eq!(
            smv_diagnostic(&f.take(100), &Partition::Singleton, &[1, 10, 100]),
            vec![1, 10, 100]
        );
    }

    #[test]
    fn whole_space_frequency_is_one() {
        let est = cs_diagnostic(
            &ProcessKind::IidUniform { lo: 0.0, hi: 1.0 },
            |_, _| true,
            &[1, 2, 3],
            200,
            4,
            1,
        )
        .unwrap();
        assert_eq!(est, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn partition_parsing() {
        assert_eq!(
            Partition::parse("dyadic8").unwrap(),
            Partition::Dyadic { depth: 8 }
        );
        assert_eq!(
            Partition::parse("dyadic:3").unwrap(),
            Partition::Dyadic { depth: 3 }
        );
        assert!(Partition::parse("cubes").is_err());
        assert!(ProcessKind::parse("nope").is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(make_process(ProcessKind::IidUniform { lo: 1.0, hi: 1.0 }, rng(0)).is_err());
        assert!(make_process(ProcessKind::FiniteSupport { points: vec![] }, rng(0)).is_err());
        assert!(make_process(
            ProcessKind::Bursty {
                eps: 1.5,
                first_window: 8
            },
            rng(0)
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn smv_counts_monotone_and_bounded(seed in 0u64..200, depth in 1u32..6) {
            let mut p = make_process(ProcessKind::IidUniform { lo: 0.0, hi: 1.0 }, rng(seed)).unwrap();
            let xs = p.take(300);
            let hs: Vec<usize> = (1..=300).step_by(7).collect();
            let c = smv_diagnostic(&xs, &Partition::Dyadic { depth }, &hs);
            for w in c.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            for (h, v) in hs.iter().zip(&c) {
                prop_assert!(*v <= (*h).min(1 << depth));
            }
        }

        #[test]
        fn processes_replay(seed in 0u64..200) {
            for kind in [ProcessKind::IidUniform { lo: 0.0, hi: 1.0 }, ProcessKind::Bursty { eps: 0.2, first_window: 8 }] {
                let a = make_process(kind.clone(), rng(seed)).unwrap().take(100);
                let b = make_process(kind, rng(seed)).unwrap().take(100);
                prop_assert_eq!(a, b);
            }
        }
    }
}
