//! Capped nearest-neighbour representatives, `(1+δ)C1NN`.
//!
//! Each new instance picks the nearest point of the dataset as its
//! representative. A point may take a second child only after passing a
//! Bernoulli(δ) draw; once it has its quota it leaves the dataset. `δ = 1`
//! is the plain 2C1NN rule.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::learner::OnlineLearner;

/// A point leaving the dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Removal {
    pub time: usize,
    /// Arrival time whose search removed it.
    pub at: usize,
    pub revealed: bool,
    /// Child count right after the removal.
    pub children: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arrival {
    First,
    Duplicate { of: usize },
    New { parent: usize },
}

/// The representative graph without responses. Times are 1-indexed.
#[derive(Clone, Debug)]
pub struct C1nnIndex<X: Instance> {
    delta: f64,
    rng: ChaCha8Rng,
    points: Vec<X>,
    dataset_times: Vec<usize>,
    dataset_points: Vec<X>,
    children: Vec<u8>,
    revealed: Vec<Option<bool>>,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    origin: Vec<usize>,
    first_seen: HashMap<X::Key, usize>,
    removals: Vec<Removal>,
    reveals: usize,
}

impl<X: Instance> C1nnIndex<X> {
    pub fn new(delta: f64, rng: ChaCha8Rng) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1], got {delta}"
            )));
        }
        Ok(Self {
            delta,
            rng,
            points: Vec::new(),
            dataset_times: Vec::new(),
            dataset_points: Vec::new(),
            children: Vec::new(),
            revealed: Vec::new(),
            parent: Vec::new(),
            depth: Vec::new(),
            origin: Vec::new(),
            first_seen: HashMap::new(),
            removals: Vec::new(),
            reveals: 0,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Number of arrivals so far.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Registers `X_t` for the next time `t` and returns how it was routed.
    pub fn insert(&mut self, x: X) -> Result<Arrival> {
        let t = self.points.len() + 1;
        let key = x.key();
        if let Some(&u) = self.first_seen.get(&key) {
            self.points.push(x);
            self.children.push(0);
            self.revealed.push(None);
            self.parent.push(None);
            self.depth.push(self.depth[u - 1]);
            self.origin.push(u);
            return Ok(Arrival::Duplicate { of: u });
        }
        self.first_seen.insert(key, t);

        if t == 1 {
            self.push_new(x, None, 0);
            return Ok(Arrival::First);
        }

        let parent = loop {
            let pos = self.nearest(&x).ok_or_else(|| {
                Error::CorruptedState(format!("dataset emptied during the search at t={t}"))
            })?;
            let u = self.dataset_times[pos];
            if self.children[u - 1] == 0 {
                break u;
            }
            let accept = self.rng.gen_bool(self.delta);
            self.reveals += 1;
            self.revealed[u - 1] = Some(accept);
            self.dataset_times.remove(pos);
            self.dataset_points.remove(pos);
            self.removals.push(Removal {
                time: u,
                at: t,
                revealed: accept,
                children: self.children[u - 1] + u8::from(accept),
            });
            if accept {
                break u;
            }
        };
        self.children[parent - 1] += 1;
        let depth = self.depth[parent - 1] + 1;
        self.push_new(x, Some(parent), depth);
        Ok(Arrival::New { parent })
    }

    fn push_new(&mut self, x: X, parent: Option<usize>, depth: usize) {
        let t = self.points.len() + 1;
        self.dataset_times.push(t);
        self.dataset_points.push(x.clone());
        self.points.push(x);
        self.children.push(0);
        self.revealed.push(None);
        self.parent.push(parent);
        self.depth.push(depth);
        self.origin.push(t);
    }

    /// Position in the dataset of the lowest-time nearest point.
    fn nearest(&self, x: &X) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (pos, p) in self.dataset_points.iter().enumerate() {
            let d = x.distance(p);
            // dataset is sorted by time, so strict `<` keeps the lowest index
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((pos, d));
            }
        }
        best.map(|(pos, _)| pos)
    }

    pub fn instance(&self, t: usize) -> &X {
        &self.points[t - 1]
    }

    /// `φ(t)`; `None` at the root and for repeated instances.
    pub fn parent(&self, t: usize) -> Option<usize> {
        self.parent[t - 1]
    }

    /// Depth in the representative tree, root at 0. A repeat inherits the
    /// depth of its first occurrence.
    pub fn depth(&self, t: usize) -> usize {
        self.depth[t - 1]
    }

    /// First time the instance `X_t` appeared.
    pub fn origin(&self, t: usize) -> usize {
        self.origin[t - 1]
    }

    pub fn children(&self, t: usize) -> u8 {
        self.children[t - 1]
    }

    pub fn revealed(&self, t: usize) -> Option<bool> {
        self.revealed[t - 1]
    }

    pub fn in_dataset(&self, t: usize) -> bool {
        self.dataset_times.binary_search(&t).is_ok()
    }

    pub fn dataset(&self) -> &[usize] {
        &self.dataset_times
    }

    pub fn removals(&self) -> &[Removal] {
        &self.removals
    }

    /// Number of Bernoulli draws consumed so far.
    pub fn reveal_count(&self) -> usize {
        self.reveals
    }

    /// `φ^steps(t)` along new-instance times.
    pub fn ancestor(&self, mut t: usize, steps: usize) -> usize {
        for _ in 0..steps {
            match self.parent[t - 1] {
                Some(p) => t = p,
                None => break,
            }
        }
        t
    }
}

/// `(1+δ)C1NN` as an online learner.
#[derive(Clone, Debug)]
pub struct C1nn<X: Instance, Y> {
    index: C1nnIndex<X>,
    responses: Vec<Y>,
    default_prediction: Y,
    pending: bool,
}

impl<X: Instance, Y: Clone> C1nn<X, Y> {
    pub fn new(delta: f64, default_prediction: Y, rng: ChaCha8Rng) -> Result<Self> {
        Ok(Self {
            index: C1nnIndex::new(delta, rng)?,
            responses: Vec::new(),
            default_prediction,
            pending: false,
        })
    }

    pub fn from_seed(delta: f64, default_prediction: Y, seed: u64) -> Result<Self> {
        Self::new(delta, default_prediction, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn index(&self) -> &C1nnIndex<X> {
        &self.index
    }
}

impl<X: Instance, Y: Clone> OnlineLearner<X, Y> for C1nn<X, Y> {
    fn predict(&mut self, x: &X) -> Result<Y> {
        if self.pending {
            return Err(Error::CorruptedState(
                "predict called twice without observe".into(),
            ));
        }
        let source = match self.index.insert(x.clone())? {
            Arrival::First => None,
            Arrival::Duplicate { of } => Some(of),
            Arrival::New { parent } => Some(parent),
        };
        self.pending = true;
        Ok(match source {
            None => self.default_prediction.clone(),
            Some(u) => self.responses[u - 1].clone(),
        })
    }

    fn observe(&mut self, y: &Y) -> Result<()> {
        if !self.pending {
            return Err(Error::CorruptedState(
                "observe called before predict".into(),
            ));
        }
        self.pending = false;
        self.responses.push(y.clone());
        Ok(())
    }
}

/// Outcome of a batch run.
#[derive(Clone, Debug)]
pub struct C1nnRun<Y> {
    pub predictions: Vec<Y>,
    /// `φ(t)` for `t = 1..=T` (index `t-1`).
    pub parents: Vec<Option<usize>>,
    pub depths: Vec<usize>,
}

/// Folds the learner over a sample.
pub fn run_c1nn<X: Instance, Y: Clone>(
    delta: f64,
    instances: &[X],
    responses: &[Y],
    default_prediction: Y,
    seed: u64,
) -> Result<C1nnRun<Y>> {
    if instances.len() != responses.len() {
        return Err(Error::InvalidParameter(format!(
            "{} instances but {} responses",
            instances.len(),
            responses.len()
        )));
    }
    let mut learner = C1nn::from_seed(delta, default_prediction, seed)?;
    let mut predictions = Vec::with_capacity(instances.len());
    for (x, y) in instances.iter().zip(responses) {
        predictions.push(learner.predict(x)?);
        learner.observe(y)?;
    }
    let n = instances.len();
    let idx = learner.index();
    Ok(C1nnRun {
        predictions,
        parents: (1..=n).map(|t| idx.parent(t)).collect(),
        depths: (1..=n).map(|t| idx.depth(t)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_prediction_is_default_and_second_copies_first() {
        let mut l = C1nn::<f64, i32>::from_seed(0.5, -1, 1).unwrap();
        assert_eq!(l.predict(&0.3).unwrap(), -1);
        l.observe(&7).unwrap();
        assert_eq!(l.predict(&0.9).unwrap(), 7);
        assert_eq!(l.index().parent(2), Some(1));
        assert_eq!(l.index().depth(2), 1);
    }

    #[test]
    fn duplicates_are_memorised_without_touching_the_dataset() {
        let mut l = C1nn::<f64, i32>::from_seed(0.5, 0, 2).unwrap();
        for (x, y) in [(0.1, 1), (0.5, 2), (0.9, 3)] {
            l.predict(&x).unwrap();
            l.observe(&y).unwrap();
        }
        let before = l.index().dataset().to_vec();
        assert_eq!(l.predict(&0.5).unwrap(), 2);
        l.observe(&9).unwrap();
        assert_eq!(l.index().dataset(), &before[..]);
        assert_eq!(l.index().parent(4), None);
        assert_eq!(l.index().origin(4), 2);
        // the first occurrence still wins over the later response
        assert_eq!(l.predict(&0.5).unwrap(), 2);
    }

    #[test]
    fn constant_stream_repeats_first_response() {
        let xs = vec![0.4; 50];
        let ys: Vec<u8> = (0..50).map(|i| (i % 3) as u8).collect();
        let run = run_c1nn(0.3, &xs, &ys, 9, 5).unwrap();
        assert_eq!(run.predictions[0], 9);
        assert!(run.predictions[1..].iter().all(|p| *p == 0));
    }

    #[test]
    fn ties_go_to_the_lowest_time() {
        let mut idx = C1nnIndex::<f64>::new(1.0, ChaCha8Rng::seed_from_u64(0)).unwrap();
        idx.insert(0.0).unwrap();
        idx.insert(2.0).unwrap();
        assert_eq!(idx.insert(1.0).unwrap(), Arrival::New { parent: 1 });
    }

    #[test]
    fn bad_delta_is_rejected() {
        assert!(C1nnIndex::<f64>::new(0.0, ChaCha8Rng::seed_from_u64(0)).is_err());
        assert!(C1nnIndex::<f64>::new(1.5, ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    proptest! {
        #[test]
        fn structural_invariants(seed in 0u64..1000, delta in 0.05f64..=1.0, pts in proptest::collection::vec(0u8..40, 1..200)) {
            let mut idx = C1nnIndex::<f64>::new(delta, ChaCha8Rng::seed_from_u64(seed)).unwrap();
            for p in &pts {
                idx.insert(*p as f64 / 40.0).unwrap();
            }
            let n = idx.len();
            for t in 1..=n {
                prop_assert!(idx.children(t) <= 2);
                if idx.children(t) == 2 {
                    prop_assert_eq!(idx.revealed(t), Some(true));
                }
                if let Some(p) = idx.parent(t) {
                    prop_assert!(p < t);
                    prop_assert_eq!(idx.depth(t), idx.depth(p) + 1);
                }
            }
            for r in idx.removals() {
                prop_assert!(!idx.in_dataset(r.time));
                prop_assert!((!r.revealed && r.children == 1) || (r.revealed && r.children == 2));
            }
        }
    }
}
