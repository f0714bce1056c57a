//! Cluster-wise forecasters built on the representative forest of
//! [`crate::c1nn`].
//!
//! Times are grouped by walking up the forest to the nearest ancestor whose
//! depth is a multiple of the window `T`; heavily repeated instances get a
//! cluster of their own. [`FEps`] runs Hedge over a finite net inside each
//! cluster; [`FEpsBlock`] cuts each cluster into consecutive blocks and runs
//! a fresh finite-horizon estimator on every block.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::c1nn::C1nnIndex;
use crate::error::{Error, Result};
use crate::ewa::{Hedge, HedgeForecaster};
use crate::instance::Instance;
use crate::learner::OnlineLearner;
use crate::numeric::{ceil_nudged, sample_index, softmax};
use crate::seed::derive_seed;
use crate::spaces::{loss_net, ValueSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClusterKey {
    /// Ancestor at the last depth multiple of the window.
    Ancestor(usize),
    /// First occurrence of an instance repeated past the threshold.
    Instance(usize),
}

/// Key of time `t`, where `count` is the number of occurrences of `X_t` up
/// to and including `t`.
pub fn cluster_key<X: Instance>(
    index: &C1nnIndex<X>,
    t: usize,
    count: usize,
    window: usize,
    threshold: f64,
) -> ClusterKey {
    let u = index.origin(t);
    if count as f64 <= threshold {
        ClusterKey::Ancestor(index.ancestor(u, index.depth(u) % window))
    } else {
        ClusterKey::Instance(u)
    }
}

/// Tracks duplicate counts and freezes each time's key at arrival.
#[derive(Clone, Debug)]
struct KeyTracker {
    window: usize,
    threshold: f64,
    counts: HashMap<usize, usize>,
    keys: Vec<ClusterKey>,
}

impl KeyTracker {
    fn new(window: usize, threshold: f64) -> Self {
        Self {
            window,
            threshold,
            counts: HashMap::new(),
            keys: Vec::new(),
        }
    }

    fn assign<X: Instance>(&mut self, index: &C1nnIndex<X>) -> ClusterKey {
        let t = index.len();
        let c = self.counts.entry(index.origin(t)).or_insert(0);
        *c += 1;
        let key = cluster_key(index, t, *c, self.window, self.threshold);
        self.keys.push(key);
        key
    }
}

/// Window, reveal probability and Hedge rate of the net forecaster.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FEpsParams {
    pub window: usize,
    pub delta: f64,
    pub eta: f64,
}

impl FEpsParams {
    pub fn new(eps: f64, net_size: usize, max_loss: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must lie in (0, 1], got {eps}"
            )));
        }
        if net_size == 0 {
            return Err(Error::EmptyExperts);
        }
        let ln_n = (net_size as f64).ln();
        let window = ceil_nudged(max_loss * max_loss * ln_n / (2.0 * eps * eps)).max(1.0) as usize;
        let delta = eps / (2.0 * window as f64);
        let eta = if ln_n == 0.0 || max_loss == 0.0 {
            0.0
        } else {
            (8.0 * ln_n / (max_loss * max_loss * window as f64)).sqrt()
        };
        Ok(Self { window, delta, eta })
    }
}

/// Net forecaster run separately inside each cluster.
#[derive(Clone, Debug)]
pub struct FEps<X: Instance, S: ValueSpace> {
    space: S,
    eps: f64,
    net: Vec<S::Value>,
    params: FEpsParams,
    index: C1nnIndex<X>,
    tracker: KeyTracker,
    sums: HashMap<ClusterKey, Vec<f64>>,
    rng: ChaCha8Rng,
    pending: Option<ClusterKey>,
}

impl<X: Instance, S: ValueSpace> FEps<X, S> {
    pub fn new(space: S, eps: f64, mut rng: ChaCha8Rng) -> Result<Self> {
        let net = loss_net(&space, eps)?;
        let max_loss = space.max_loss().ok_or(Error::UnsupportedNet)?;
        let params = FEpsParams::new(eps, net.len(), max_loss)?;
        let index = C1nnIndex::new(params.delta, ChaCha8Rng::seed_from_u64(rng.gen()))?;
        Ok(Self {
            space,
            eps,
            net,
            params,
            index,
            tracker: KeyTracker::new(params.window, params.window as f64 / eps),
            sums: HashMap::new(),
            rng,
            pending: None,
        })
    }

    pub fn params(&self) -> FEpsParams {
        self.params
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn net(&self) -> &[S::Value] {
        &self.net
    }

    pub fn index(&self) -> &C1nnIndex<X> {
        &self.index
    }

    /// Keys frozen at each arrival, index `t-1`.
    pub fn keys(&self) -> &[ClusterKey] {
        &self.tracker.keys
    }

    /// Sampling distribution over the net given a cluster's loss sums.
    pub fn distribution_for(&self, key: &ClusterKey) -> Vec<f64> {
        match self.sums.get(key) {
            Some(l) => softmax(&l.iter().map(|v| -self.params.eta * v).collect::<Vec<_>>()),
            None => vec![1.0 / self.net.len() as f64; self.net.len()],
        }
    }
}

impl<X: Instance, S: ValueSpace> OnlineLearner<X, S::Value> for FEps<X, S> {
    fn predict(&mut self, x: &X) -> Result<S::Value> {
        if self.pending.is_some() {
            return Err(Error::CorruptedState(
                "predict called twice without observe".into(),
            ));
        }
        self.index.insert(x.clone())?;
        let key = self.tracker.assign(&self.index);
        let p = self.distribution_for(&key);
        self.pending = Some(key);
        Ok(self.net[sample_index(&p, self.rng.gen::<f64>())].clone())
    }

    fn observe(&mut self, y: &S::Value) -> Result<()> {
        let key = self
            .pending
            .take()
            .ok_or_else(|| Error::CorruptedState("observe called before predict".into()))?;
        let n = self.net.len();
        let sums = self.sums.entry(key).or_insert_with(|| vec![0.0; n]);
        for (s, v) in sums.iter_mut().zip(&self.net) {
            *s += self.space.loss(v, y);
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------

/// A forecaster that only has to be good over a fixed number of rounds.
pub trait FiniteTimeLearner<Y>: Send {
    fn predict(&mut self) -> Y;
    fn observe(&mut self, y: &Y);
}

/// Factory of finite-horizon forecasters at a given tolerance.
pub trait FtimeEstimator<Y>: Send + Sync {
    fn tolerance(&self) -> f64;
    fn horizon(&self) -> usize;
    fn spawn(&self, rng: ChaCha8Rng) -> Box<dyn FiniteTimeLearner<Y>>;
}

impl<S: ValueSpace + Clone + 'static> FiniteTimeLearner<S::Value> for HedgeForecaster<S> {
    fn predict(&mut self) -> S::Value {
        self.sample()
    }
    fn observe(&mut self, y: &S::Value) {
        // lengths always match, the net is fixed at construction
        let _ = self.update(y);
    }
}

/// Hedge over a net at loss radius `η/2`, run for `⌈2ℓ̄² ln|N| / η²⌉` rounds.
#[derive(Clone, Debug)]
pub struct TotallyBoundedFtime<S: ValueSpace> {
    space: S,
    tolerance: f64,
    net: Vec<S::Value>,
    horizon: usize,
    rate: f64,
}

impl<S: ValueSpace + Clone> TotallyBoundedFtime<S> {
    pub fn new(space: S, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        let max_loss = space.max_loss().ok_or(Error::UnsupportedNet)?;
        let net = loss_net(&space, tolerance / 2.0)?;
        if net.is_empty() {
            return Err(Error::EmptyExperts);
        }
        let ln_n = (net.len() as f64).ln();
        let horizon = ceil_nudged(2.0 * max_loss * max_loss * ln_n / (tolerance * tolerance))
            .max(1.0) as usize;
        let rate = Hedge::optimal_rate(net.len(), horizon, max_loss);
        Ok(Self {
            space,
            tolerance,
            net,
            horizon,
            rate,
        })
    }

    pub fn net(&self) -> &[S::Value] {
        &self.net
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn forecaster(&self, rng: ChaCha8Rng) -> HedgeForecaster<S> {
        HedgeForecaster::new(self.space.clone(), self.net.clone(), self.rate, rng)
            .expect("net is non-empty and the rate finite")
    }
}

impl<S: ValueSpace + Clone + 'static> FtimeEstimator<S::Value> for TotallyBoundedFtime<S> {
    fn tolerance(&self) -> f64 {
        self.tolerance
    }
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn spawn(&self, rng: ChaCha8Rng) -> Box<dyn FiniteTimeLearner<S::Value>> {
        Box::new(self.forecaster(rng))
    }
}

/// Worst average expected excess of the Hedge forecaster of `ftime` over all
/// response sequences of its horizon drawn from `values`, against every
/// comparator in `values`.
pub fn certify_ftime<S: ValueSpace + Clone>(
    ftime: &TotallyBoundedFtime<S>,
    values: &[S::Value],
) -> f64 {
    let space = &ftime.space;
    let loss: Vec<Vec<f64>> = ftime
        .net
        .iter()
        .map(|a| values.iter().map(|b| space.loss(a, b)).collect())
        .collect();
    let cmp: Vec<Vec<f64>> = values
        .iter()
        .map(|a| values.iter().map(|b| space.loss(a, b)).collect())
        .collect();
    let mut cum = vec![0.0; ftime.net.len()];
    let mut comp = vec![0.0; values.len()];
    let mut worst = f64::NEG_INFINITY;
    certify_dfs(ftime, &loss, &cmp, &mut cum, &mut comp, 0.0, 0, &mut worst);
    worst / ftime.horizon as f64
}

#[allow(clippy::too_many_arguments)]
fn certify_dfs<S: ValueSpace>(
    ftime: &TotallyBoundedFtime<S>,
    loss: &[Vec<f64>],
    cmp: &[Vec<f64>],
    cum: &mut [f64],
    comp: &mut [f64],
    learner: f64,
    depth: usize,
    worst: &mut f64,
) {
    if depth == ftime.horizon {
        let best = comp.iter().copied().fold(f64::INFINITY, f64::min);
        *worst = worst.max(learner - best);
        return;
    }
    let p = softmax(&cum.iter().map(|l| -ftime.rate * l).collect::<Vec<_>>());
    for y in 0..cmp.len() {
        let expected: f64 = p.iter().zip(loss).map(|(p, row)| p * row[y]).sum();
        for (c, row) in cum.iter_mut().zip(loss) {
            *c += row[y];
        }
        for (c, row) in comp.iter_mut().zip(cmp) {
            *c += row[y];
        }
        certify_dfs(
            ftime,
            loss,
            cmp,
            cum,
            comp,
            learner + expected,
            depth + 1,
            worst,
        );
        for (c, row) in cum.iter_mut().zip(loss) {
            *c -= row[y];
        }
        for (c, row) in comp.iter_mut().zip(cmp) {
            *c -= row[y];
        }
    }
}

// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct BlockCursor {
    block: usize,
    position: usize,
}

struct Block<Y> {
    start: usize,
    learner: Option<Box<dyn FiniteTimeLearner<Y>>>,
    times: Vec<usize>,
}

/// Block placement of one time step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockSlot {
    pub block: usize,
    /// Position `L_t` inside the block, in `[0, t_ε)`.
    pub position: usize,
}

/// Cluster-wise forecaster that restarts a finite-horizon estimator every
/// `t_ε` times within a cluster.
pub struct FEpsBlock<X: Instance, Y> {
    ftime: Box<dyn FtimeEstimator<Y>>,
    block_len: usize,
    window: usize,
    delta: f64,
    seed: u64,
    index: C1nnIndex<X>,
    tracker: KeyTracker,
    cursors: HashMap<ClusterKey, BlockCursor>,
    blocks: Vec<Block<Y>>,
    slots: Vec<BlockSlot>,
    pending: Option<usize>,
}

impl<X: Instance, Y: Clone> FEpsBlock<X, Y> {
    pub fn new(ftime: Box<dyn FtimeEstimator<Y>>, eps: f64, seed: u64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must lie in (0, 1], got {eps}"
            )));
        }
        let block_len = ftime.horizon();
        if block_len == 0 {
            return Err(Error::InvalidParameter(
                "estimator horizon must be positive".into(),
            ));
        }
        let window = ceil_nudged(block_len as f64 / eps).max(1.0) as usize;
        let delta = eps / (2.0 * window as f64);
        let index = C1nnIndex::new(
            delta,
            ChaCha8Rng::seed_from_u64(derive_seed(seed, "c1nn", 0)),
        )?;
        Ok(Self {
            ftime,
            block_len,
            window,
            delta,
            seed,
            index,
            tracker: KeyTracker::new(window, window as f64 / eps),
            cursors: HashMap::new(),
            blocks: Vec::new(),
            slots: Vec::new(),
            pending: None,
        })
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn slots(&self) -> &[BlockSlot] {
        &self.slots
    }

    pub fn keys(&self) -> &[ClusterKey] {
        &self.tracker.keys
    }

    /// Start time of a block.
    pub fn block_start(&self, block: usize) -> usize {
        self.blocks[block].start
    }

    /// Times whose responses a block's learner has received.
    pub fn block_times(&self, block: usize) -> &[usize] {
        &self.blocks[block].times
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }
}

impl<X: Instance, Y: Clone> OnlineLearner<X, Y> for FEpsBlock<X, Y> {
    fn predict(&mut self, x: &X) -> Result<Y> {
        if self.pending.is_some() {
            return Err(Error::CorruptedState(
                "predict called twice without observe".into(),
            ));
        }
        self.index.insert(x.clone())?;
        let t = self.index.len();
        let key = self.tracker.assign(&self.index);
        let cursor = match self.cursors.get(&key) {
            Some(c) if c.position + 1 < self.block_len => BlockCursor {
                block: c.block,
                position: c.position + 1,
            },
            _ => {
                let rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, "block", t as u64));
                self.blocks.push(Block {
                    start: t,
                    learner: Some(self.ftime.spawn(rng)),
                    times: Vec::new(),
                });
                BlockCursor {
                    block: self.blocks.len() - 1,
                    position: 0,
                }
            }
        };
        self.cursors.insert(key, cursor);
        self.slots.push(BlockSlot {
            block: cursor.block,
            position: cursor.position,
        });
        let learner = self.blocks[cursor.block].learner.as_mut().ok_or_else(|| {
            Error::CorruptedState(format!("block {} already closed", cursor.block))
        })?;
        let y = learner.predict();
        self.pending = Some(cursor.block);
        Ok(y)
    }

    fn observe(&mut self, y: &Y) -> Result<()> {
        let b = self
            .pending
            .take()
            .ok_or_else(|| Error::CorruptedState("observe called before predict".into()))?;
        let t = self.index.len();
        let block = &mut self.blocks[b];
        block.times.push(t);
        if let Some(l) = block.learner.as_mut() {
            l.observe(y);
        }
        if block.times.len() == self.block_len {
            block.learner = None;
        }
        Ok(())
    }
}
