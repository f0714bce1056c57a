use std::fmt::Write as _;

use serde::Serialize;

/// Per-step losses of one replica.
#[derive(Clone, Debug, Default)]
pub struct ReplicaTrace {
    pub learner: Vec<f64>,
    /// One loss sequence per comparator, same order as the scenario's names.
    pub comparators: Vec<Vec<f64>>,
}

impl ReplicaTrace {
    pub fn with_comparators(n: usize, horizon: usize) -> Self {
        Self {
            learner: Vec::with_capacity(horizon),
            comparators: (0..n).map(|_| Vec::with_capacity(horizon)).collect(),
        }
    }

    pub fn push(&mut self, learner: f64, comparators: &[f64]) {
        self.learner.push(learner);
        for (c, v) in self.comparators.iter_mut().zip(comparators) {
            c.push(*v);
        }
    }

    pub fn average_learner_loss(&self) -> f64 {
        self.learner.iter().sum::<f64>() / self.learner.len().max(1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: usize,
    pub learner_cum: f64,
    pub comparator_cum: Vec<f64>,
    /// `(learner - best comparator) / t`.
    pub excess_avg: f64,
}

/// Replica-averaged cumulative losses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegretTrace {
    pub comparator_names: Vec<String>,
    pub rows: Vec<TraceRow>,
}

impl RegretTrace {
    /// Means over replicas, reduced in replica order.
    pub fn aggregate(names: &[&str], replicas: &[ReplicaTrace]) -> Self {
        let horizon = replicas.iter().map(|r| r.learner.len()).min().unwrap_or(0);
        let n = replicas.len().max(1) as f64;
        let mut rows = Vec::with_capacity(horizon);
        let mut learner_cum = 0.0;
        let mut comp_cum = vec![0.0; names.len()];
        for t in 0..horizon {
            let mut l = 0.0;
            let mut c = vec![0.0; names.len()];
            for r in replicas {
                l += r.learner[t];
                for (acc, seq) in c.iter_mut().zip(&r.comparators) {
                    *acc += seq[t];
                }
            }
            learner_cum += l / n;
            for (acc, v) in comp_cum.iter_mut().zip(&c) {
                *acc += v / n;
            }
            let best = comp_cum.iter().copied().fold(f64::INFINITY, f64::min);
            let excess = if best.is_finite() {
                (learner_cum - best) / (t + 1) as f64
            } else {
                0.0
            };
            rows.push(TraceRow {
                t: t + 1,
                learner_cum,
                comparator_cum: comp_cum.clone(),
                excess_avg: excess,
            });
        }
        Self {
            comparator_names: names.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,loss_learner_cum");
        for n in &self.comparator_names {
            write!(out, ",loss_{n}_cum").expect("writing to a String");
        }
        out.push_str(",excess_avg\n");
        for r in &self.rows {
            write!(out, "{},{}", r.t, r.learner_cum).expect("writing to a String");
            for c in &r.comparator_cum {
                write!(out, ",{c}").expect("writing to a String");
            }
            writeln!(out, ",{}", r.excess_avg).expect("writing to a String");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregation_and_csv() {
        let mut a = ReplicaTrace::with_comparators(1, 2);
        a.push(1.0, &[0.0]);
        a.push(0.0, &[1.0]);
        let mut b = ReplicaTrace::with_comparators(1, 2);
        b.push(0.0, &[0.0]);
        b.push(1.0, &[1.0]);
        let tr = RegretTrace::aggregate(&["zero"], &[a, b]);
        assert_eq!(tr.rows[1].learner_cum, 1.0);
        assert_eq!(tr.rows[1].comparator_cum, vec![1.0]);
        assert_eq!(tr.rows[0].excess_avg, 0.5);
        assert_eq!(
            tr.to_csv(),
            "t,loss_learner_cum,loss_zero_cum,excess_avg\n1,0.5,0,0.5\n2,1,1,0\n"
        );
    }
}
