//! Anytime model selection.
//!
//! * [`Combiner`]: experts `i = 0, 1, …` enter at `⌈e^i⌉`, rate `√(ln t / t)`.
//! * [`TruncationSelector`]: level `M` sees responses clipped to the loss
//!   ball of radius `M` around the anchor.
//! * [`CsLearner`]: aggregation over a countable family of piecewise-constant
//!   functions built on a cell basis of the instance space.
//!
//! Experts are created when they enter and are brought up to date by
//! replaying the stored history.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ewa::{AnytimeAggregator, MeanEstimator};
use crate::instance::Instance;
use crate::learner::OnlineLearner;
use crate::numeric::{ceil_nudged, ln_t, max_index_below, sample_index};
use crate::seed::derive_seed;
use crate::spaces::{restrict, ValueSpace};

pub type BoxedLearner<X, Y> = Box<dyn OnlineLearner<X, Y> + Send>;
pub type ExpertFactory<X, Y> = Box<dyn FnMut(usize) -> Result<BoxedLearner<X, Y>> + Send>;

/// Entry time `⌈e^i⌉` of expert `i`.
pub fn combiner_entry_time(i: usize) -> usize {
    ceil_nudged((i as f64).exp()) as usize
}

/// Bookkeeping shared by the three selectors: which experts are live, their
/// aggregate weights, and per-slot sampled-loss sums.
#[derive(Clone, Debug, Default)]
struct Selection {
    agg: AnytimeAggregator,
    sampled: Vec<f64>,
    probs: Vec<f64>,
    chosen: usize,
    last_lhat: f64,
}

impl Selection {
    fn activate(&mut self, t: usize) {
        self.agg.activate(t);
        self.sampled.push(0.0);
    }

    fn choose(&mut self, eta: f64, rng: &mut ChaCha8Rng) -> Result<usize> {
        self.probs = self.agg.probabilities(eta)?;
        self.chosen = sample_index(&self.probs, rng.gen::<f64>());
        Ok(self.chosen)
    }

    fn settle(&mut self, losses: &[f64]) -> Result<f64> {
        self.last_lhat = self.agg.update(&self.probs, losses)?;
        let realised = losses[self.chosen];
        for s in &mut self.sampled {
            *s += realised;
        }
        Ok(realised)
    }
}

/// Read-only view of a selector's per-expert sums.
pub trait SelectionReport {
    fn aggregator(&self) -> &AnytimeAggregator;
    /// Sum of the selector's realised losses since the expert's entry.
    fn sampled_since_entry(&self, slot: usize) -> f64;
    /// `ℓ̂_t` of the last settled round.
    fn last_expected_loss(&self) -> f64;
    fn last_probabilities(&self) -> &[f64];
}

macro_rules! impl_report {
    ($ty:ident < $($g:ident),* > where $($bounds:tt)*) => {
        impl<$($g),*> SelectionReport for $ty<$($g),*> where $($bounds)* {
            fn aggregator(&self) -> &AnytimeAggregator {
                &self.sel.agg
            }
            fn sampled_since_entry(&self, slot: usize) -> f64 {
                self.sel.sampled[slot]
            }
            fn last_expected_loss(&self) -> f64 {
                self.sel.last_lhat
            }
            fn last_probabilities(&self) -> &[f64] {
                &self.sel.probs
            }
        }
    };
}

// ---------------------------------------------------------------------------

/// Anytime combination of a countable expert sequence.
pub struct Combiner<X, S: ValueSpace> {
    space: S,
    factory: ExpertFactory<X, S::Value>,
    experts: Vec<BoxedLearner<X, S::Value>>,
    history: Vec<(X, S::Value)>,
    predictions: Vec<S::Value>,
    sel: Selection,
    rng: ChaCha8Rng,
    t: usize,
    pending: bool,
    max_experts: Option<usize>,
}

impl<X: Clone, S: ValueSpace> Combiner<X, S> {
    pub fn new(space: S, factory: ExpertFactory<X, S::Value>, rng: ChaCha8Rng) -> Self {
        Self {
            space,
            factory,
            experts: Vec::new(),
            history: Vec::new(),
            predictions: Vec::new(),
            sel: Selection::default(),
            rng,
            t: 0,
            pending: false,
            max_experts: None,
        }
    }

    /// Stops creating experts after the first `n`.
    pub fn with_max_experts(mut self, n: usize) -> Self {
        self.max_experts = Some(n);
        self
    }

    /// `√(ln t / t)`, zero at `t = 1`.
    pub fn rate(t: usize) -> f64 {
        (ln_t(t) / t as f64).sqrt()
    }

    pub fn expert_count(&self) -> usize {
        self.experts.len()
    }

    /// Predictions of the active experts for the current round.
    pub fn expert_predictions(&self) -> &[S::Value] {
        &self.predictions
    }
}

impl<X: Clone, S: ValueSpace> OnlineLearner<X, S::Value> for Combiner<X, S> {
    fn predict(&mut self, x: &X) -> Result<S::Value> {
        if self.pending {
            return Err(Error::CorruptedState(
                "predict called twice without observe".into(),
            ));
        }
        self.t += 1;
        let t = self.t;
        while combiner_entry_time(self.experts.len()) <= t
            && self.max_experts.map_or(true, |n| self.experts.len() < n)
        {
            let i = self.experts.len();
            let mut e = (self.factory)(i)?;
            for (hx, hy) in &self.history {
                e.predict(hx)?;
                e.observe(hy)?;
            }
            self.experts.push(e);
            self.sel.activate(t);
        }
        if self.experts.is_empty() {
            return Err(Error::NoActiveExpert(t));
        }
        self.predictions.clear();
        for e in &mut self.experts {
            self.predictions.push(e.predict(x)?);
        }
        let i = self.sel.choose(Self::rate(t), &mut self.rng)?;
        self.history.push((x.clone(), self.space.anchor()));
        self.pending = true;
        Ok(self.predictions[i].clone())
    }

    fn observe(&mut self, y: &S::Value) -> Result<()> {
        if !self.pending {
            return Err(Error::CorruptedState(
                "observe called before predict".into(),
            ));
        }
        self.pending = false;
        let losses: Vec<f64> = self
            .predictions
            .iter()
            .map(|p| self.space.loss(p, y))
            .collect();
        self.sel.settle(&losses)?;
        for e in &mut self.experts {
            e.observe(y)?;
        }
        if let Some(last) = self.history.last_mut() {
            last.1 = y.clone();
        }
        Ok(())
    }
}

impl_report!(Combiner<X, S> where X: Clone, S: ValueSpace);

// ---------------------------------------------------------------------------

/// Entry time `⌈e^{2^{α-1} M}⌉` of truncation level `M`.
pub fn level_entry_time(level: usize, alpha: f64) -> usize {
    ceil_nudged((2f64.powf(alpha - 1.0) * level as f64).exp()) as usize
}

/// Clipping radius `2^{1-α} ln t` applied to the response of round `t`.
pub fn clip_level(t: usize, alpha: f64) -> f64 {
    2f64.powf(1.0 - alpha) * ln_t(t)
}

/// Levels `M` with `M <= 2^{1-α} ln t`.
pub fn active_levels(t: usize, alpha: f64) -> Vec<usize> {
    match max_index_below(clip_level(t, alpha)) {
        Some(top) => (0..=top)
            .filter(|&m| level_entry_time(m, alpha) <= t)
            .collect(),
        None => Vec::new(),
    }
}

/// Model selection over truncation levels for unbounded losses.
pub struct TruncationSelector<X, S: ValueSpace> {
    space: S,
    anchor: S::Value,
    factory: ExpertFactory<X, S::Value>,
    levels: Vec<BoxedLearner<X, S::Value>>,
    history: Vec<(X, S::Value)>,
    predictions: Vec<S::Value>,
    sel: Selection,
    rng: ChaCha8Rng,
    t: usize,
    pending: bool,
}

impl<X: Clone, S: ValueSpace> TruncationSelector<X, S> {
    /// `factory(M)` builds the learner for level `M`.
    pub fn new(space: S, factory: ExpertFactory<X, S::Value>, rng: ChaCha8Rng) -> Self {
        let anchor = space.anchor();
        Self {
            space,
            anchor,
            factory,
            levels: Vec::new(),
            history: Vec::new(),
            predictions: Vec::new(),
            sel: Selection::default(),
            rng,
            t: 0,
            pending: false,
        }
    }

    pub fn rate(t: usize) -> f64 {
        1.0 / (4.0 * (t as f64).sqrt())
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn level_predictions(&self) -> &[S::Value] {
        &self.predictions
    }
}

impl<X: Clone, S: ValueSpace> OnlineLearner<X, S::Value> for TruncationSelector<X, S> {
    fn predict(&mut self, x: &X) -> Result<S::Value> {
        if self.pending {
            return Err(Error::CorruptedState(
                "predict called twice without observe".into(),
            ));
        }
        self.t += 1;
        let t = self.t;
        let alpha = self.space.alpha();
        let top = max_index_below(clip_level(t, alpha));
        while let Some(top) = top {
            let m = self.levels.len();
            if m > top || level_entry_time(m, alpha) > t {
                break;
            }
            let mut l = (self.factory)(m).map_err(|e| Error::LevelFactory {
                level: m,
                reason: e.to_string(),
            })?;
            for (hx, hy) in &self.history {
                l.predict(hx)?;
                l.observe(&restrict(&self.space, hy, m as f64, &self.anchor))?;
            }
            self.levels.push(l);
            self.sel.activate(t);
        }
        if self.levels.is_empty() {
            return Err(Error::NoActiveExpert(t));
        }
        self.predictions.clear();
        for l in &mut self.levels {
            self.predictions.push(l.predict(x)?);
        }
        let i = self.sel.choose(Self::rate(t), &mut self.rng)?;
        self.history.push((x.clone(), self.anchor.clone()));
        self.pending = true;
        Ok(self.predictions[i].clone())
    }

    fn observe(&mut self, y: &S::Value) -> Result<()> {
        if !self.pending {
            return Err(Error::CorruptedState(
                "observe called before predict".into(),
            ));
        }
        self.pending = false;
        let target = restrict(
            &self.space,
            y,
            clip_level(self.t, self.space.alpha()),
            &self.anchor,
        );
        let losses: Vec<f64> = self
            .predictions
            .iter()
            .map(|p| self.space.loss(p, &target))
            .collect();
        self.sel.settle(&losses)?;
        for (m, l) in self.levels.iter_mut().enumerate() {
            l.observe(&restrict(&self.space, y, m as f64, &self.anchor))?;
        }
        if let Some(last) = self.history.last_mut() {
            last.1 = y.clone();
        }
        Ok(())
    }
}

impl_report!(TruncationSelector<X, S> where X: Clone, S: ValueSpace);

/// One learner per distinct instance.
pub struct PerInstance<X: Instance, Y> {
    make: Box<dyn FnMut(usize) -> Result<BoxedLearner<X, Y>> + Send>,
    learners: HashMap<X::Key, BoxedLearner<X, Y>>,
    current: Option<X::Key>,
}

impl<X: Instance, Y> PerInstance<X, Y> {
    /// `make(n)` builds the learner for the `n`-th distinct instance.
    pub fn new(make: Box<dyn FnMut(usize) -> Result<BoxedLearner<X, Y>> + Send>) -> Self {
        Self {
            make,
            learners: HashMap::new(),
            current: None,
        }
    }

    /// Per-instance mean estimation over a space's dense sequence.
    pub fn mean_estimation<S>(space: S, seed: u64) -> Self
    where
        S: ValueSpace<Value = Y> + Clone + 'static,
        Y: Send + 'static,
        X: 'static,
    {
        Self::new(Box::new(move |n| {
            let rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "instance", n as u64));
            Ok(Box::new(MeanEstimator::new(space.clone(), rng)?) as BoxedLearner<X, Y>)
        }))
    }
}

impl<X: Instance, Y> OnlineLearner<X, Y> for PerInstance<X, Y> {
    fn predict(&mut self, x: &X) -> Result<Y> {
        let key = x.key();
        if !self.learners.contains_key(&key) {
            let l = (self.make)(self.learners.len())?;
            self.learners.insert(key.clone(), l);
        }
        let y = self
            .learners
            .get_mut(&key)
            .expect("inserted above")
            .predict(x)?;
        self.current = Some(key);
        Ok(y)
    }

    fn observe(&mut self, y: &Y) -> Result<()> {
        let key = self
            .current
            .take()
            .ok_or_else(|| Error::CorruptedState("observe called before predict".into()))?;
        self.learners
            .get_mut(&key)
            .expect("present since predict")
            .observe(y)
    }
}

// ---------------------------------------------------------------------------

/// Countable family of sets `A_1, A_2, …` of an instance space. Index 0 is
/// the whole space and is never queried.
pub trait CellBasis<X>: Send + Sync {
    fn contains(&self, cell: usize, x: &X) -> bool;
}

/// Dyadic intervals of `[0,1]` in heap order: 1 = `[0,1/2)`, 2 = `[1/2,1)`,
/// 3 = `[0,1/4)`, …
#[derive(Clone, Copy, Debug, Default)]
pub struct DyadicCells;

impl DyadicCells {
    pub fn bounds(cell: usize) -> (f64, f64) {
        let depth = usize::BITS - 1 - (cell + 1).leading_zeros();
        let offset = (cell + 1) - (1usize << depth);
        let w = 1.0 / (1u64 << depth) as f64;
        (offset as f64 * w, (offset + 1) as f64 * w)
    }
}

impl CellBasis<f64> for DyadicCells {
    fn contains(&self, cell: usize, x: &f64) -> bool {
        let (lo, hi) = Self::bounds(cell);
        lo <= *x && *x < hi
    }
}

/// Inverse Cantor pairing.
fn unpair(z: usize) -> (usize, usize) {
    let w = ((((8 * z + 1) as f64).sqrt() - 1.0) / 2.0).floor() as usize;
    // correct the float estimate
    let mut w = w;
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let y = z - w * (w + 1) / 2;
    (w - y, y)
}

/// Dyadic cells of `ℝ`: cell `a` unpairs `a-1` into an integer offset
/// (zig-zag coded) and a heap index inside `[z, z+1)` (0 = the whole unit).
#[derive(Clone, Copy, Debug, Default)]
pub struct DyadicLineCells;

impl DyadicLineCells {
    pub fn bounds(cell: usize) -> (f64, f64) {
        let (zc, h) = unpair(cell - 1);
        let z = if zc % 2 == 0 {
            (zc / 2) as f64
        } else {
            -(((zc + 1) / 2) as f64)
        };
        let (lo, hi) = if h == 0 {
            (0.0, 1.0)
        } else {
            DyadicCells::bounds(h)
        };
        (z + lo, z + hi)
    }
}

impl CellBasis<f64> for DyadicLineCells {
    fn contains(&self, cell: usize, x: &f64) -> bool {
        let (lo, hi) = Self::bounds(cell);
        lo <= *x && *x < hi
    }
}

/// Quadtree cells of `[-1,1]^2`; children of cell `c` are `4c+1..=4c+4`.
#[derive(Clone, Copy, Debug, Default)]
pub struct QuadCells;

impl QuadCells {
    pub fn bounds(cell: usize) -> ([f64; 2], [f64; 2]) {
        let mut path = Vec::new();
        let mut c = cell;
        while c > 0 {
            path.push((c - 1) % 4);
            c = (c - 1) / 4;
        }
        let (mut lo, mut hi) = ([-1.0, -1.0], [1.0, 1.0]);
        for q in path.into_iter().rev() {
            let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
            if q & 1 == 0 {
                hi[0] = mid[0];
            } else {
                lo[0] = mid[0];
            }
            if q & 2 == 0 {
                hi[1] = mid[1];
            } else {
                lo[1] = mid[1];
            }
        }
        (lo, hi)
    }
}

impl CellBasis<[f64; 2]> for QuadCells {
    fn contains(&self, cell: usize, x: &[f64; 2]) -> bool {
        let (lo, hi) = Self::bounds(cell);
        lo[0] <= x[0] && x[0] < hi[0] && lo[1] <= x[1] && x[1] < hi[1]
    }
}

/// Singletons of a countable instance space: cell `a` is `{a-1}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SingletonCells;

impl CellBasis<usize> for SingletonCells {
    fn contains(&self, cell: usize, x: &usize) -> bool {
        cell == x + 1
    }
}

/// `(label index l >= 1, cell a >= 1)` pieces; later pieces override earlier
/// ones, and points outside every piece get label 0.
pub type FunctionSpec = Vec<(usize, usize)>;

/// Cost-ordered enumeration of [`FunctionSpec`]s. A piece `(l, a)` costs
/// `l + a`; specs are listed by total cost, then by the first piece (cost
/// ascending, then `l` ascending), then recursively by the rest.
#[derive(Clone, Debug)]
pub struct SpecEnumeration {
    counts: Vec<u64>,
    starts: Vec<u64>,
}

impl Default for SpecEnumeration {
    fn default() -> Self {
        Self::new()
    }
}

impl SpecEnumeration {
    pub fn new() -> Self {
        let mut counts: Vec<u64> = vec![1];
        let mut starts: Vec<u64> = vec![0];
        // stop once the cumulative index would overflow
        loop {
            let c = counts.len();
            let mut n: u64 = 0;
            let mut overflow = false;
            for w in 2..=c {
                match ((w - 1) as u64)
                    .checked_mul(counts[c - w])
                    .and_then(|v| n.checked_add(v))
                {
                    Some(v) => n = v,
                    None => {
                        overflow = true;
                        break;
                    }
                }
            }
            let start = starts[c - 1].checked_add(counts[c - 1]);
            match (overflow, start) {
                (false, Some(s)) if s.checked_add(n).is_some() => {
                    counts.push(n);
                    starts.push(s);
                }
                _ => break,
            }
        }
        Self { counts, starts }
    }

    /// Number of specs of total cost `c`.
    pub fn count(&self, c: usize) -> u64 {
        self.counts[c]
    }

    pub fn max_cost(&self) -> usize {
        self.counts.len() - 1
    }

    fn rank_in_cost(&self, spec: &[(usize, usize)]) -> Option<u64> {
        let Some(&(l, a)) = spec.first() else {
            return Some(0);
        };
        let w = l + a;
        let rest = &spec[1..];
        let c: usize = spec.iter().map(|(l, a)| l + a).sum();
        let mut r: u64 = 0;
        for w2 in 2..w {
            r = r.checked_add(((w2 - 1) as u64).checked_mul(*self.counts.get(c - w2)?)?)?;
        }
        r = r.checked_add(((l - 1) as u64).checked_mul(*self.counts.get(c - w)?)?)?;
        r.checked_add(self.rank_in_cost(rest)?)
    }

    pub fn encode(&self, spec: &[(usize, usize)]) -> Result<u64> {
        if spec.iter().any(|&(l, a)| l == 0 || a == 0) {
            return Err(Error::InvalidParameter(
                "pieces need l >= 1 and a >= 1".into(),
            ));
        }
        let c: usize = spec.iter().map(|(l, a)| l + a).sum();
        if c > self.max_cost() {
            return Err(Error::Overflow(format!(
                "spec cost {c} exceeds the enumerable range"
            )));
        }
        let r = self
            .rank_in_cost(spec)
            .ok_or_else(|| Error::Overflow("spec rank exceeds u64".into()))?;
        Ok(self.starts[c] + r)
    }

    pub fn decode(&self, index: u64) -> Result<FunctionSpec> {
        let c = match self.starts.iter().rposition(|&s| s <= index) {
            Some(c) if index - self.starts[c] < self.counts[c] => c,
            _ => {
                return Err(Error::Overflow(format!(
                    "index {index} exceeds the enumerable range"
                )))
            }
        };
        let mut r = index - self.starts[c];
        let mut remaining = c;
        let mut spec = Vec::new();
        while remaining > 0 {
            let mut chosen = None;
            for w in 2..=remaining {
                let block = (w - 1) as u64 * self.counts[remaining - w];
                if r < block {
                    let sub = self.counts[remaining - w];
                    let l = (r / sub) as usize + 1;
                    r %= sub;
                    chosen = Some((l, w - l));
                    break;
                }
                r -= block;
            }
            let (l, a) = chosen
                .ok_or_else(|| Error::CorruptedState("enumeration rank out of range".into()))?;
            spec.push((l, a));
            remaining -= l + a;
        }
        Ok(spec)
    }
}

/// Label index chosen by `spec` at `x`.
pub fn spec_label<X>(spec: &[(usize, usize)], cells: &dyn CellBasis<X>, x: &X) -> usize {
    spec.iter()
        .rev()
        .find(|(_, a)| cells.contains(*a, x))
        .map_or(0, |(l, _)| *l)
}

/// Learner aggregating the enumerated function family.
pub struct CsLearner<X, S: ValueSpace> {
    space: S,
    cells: Box<dyn CellBasis<X>>,
    enumeration: SpecEnumeration,
    labels: Vec<S::Value>,
    label_anchor_loss: Vec<f64>,
    labels_exhausted: bool,
    specs: Vec<FunctionSpec>,
    /// slot → family index
    active: Vec<usize>,
    is_active: Vec<bool>,
    predictions: Vec<S::Value>,
    sel: Selection,
    rng: ChaCha8Rng,
    t: usize,
    pending: bool,
}

impl<X, S: ValueSpace> CsLearner<X, S> {
    pub fn new(space: S, cells: Box<dyn CellBasis<X>>, rng: ChaCha8Rng) -> Result<Self> {
        let y0 = space.dense_point(0)?.ok_or(Error::MissingDenseSequence)?;
        Ok(Self {
            space,
            cells,
            enumeration: SpecEnumeration::new(),
            labels: vec![y0],
            label_anchor_loss: vec![0.0],
            labels_exhausted: false,
            specs: Vec::new(),
            active: Vec::new(),
            is_active: Vec::new(),
            predictions: Vec::new(),
            sel: Selection::default(),
            rng,
            t: 0,
            pending: false,
        })
    }

    /// `1 / (ln t √t)`; round 1 has a single expert and uses weight 1.
    pub fn rate(t: usize) -> f64 {
        if t < 2 {
            0.0
        } else {
            1.0 / (ln_t(t) * (t as f64).sqrt())
        }
    }

    fn label(&mut self, l: usize) -> Result<Option<f64>> {
        while self.labels.len() <= l {
            if self.labels_exhausted {
                return Ok(None);
            }
            match self.space.dense_point(self.labels.len())? {
                Some(v) => {
                    self.label_anchor_loss
                        .push(self.space.loss(&v, &self.labels[0]));
                    self.labels.push(v);
                }
                None => {
                    self.labels_exhausted = true;
                    return Ok(None);
                }
            }
        }
        Ok(Some(self.label_anchor_loss[l]))
    }

    fn spec(&mut self, i: usize) -> Result<&FunctionSpec> {
        while self.specs.len() <= i {
            let s = self.enumeration.decode(self.specs.len() as u64)?;
            self.specs.push(s);
        }
        Ok(&self.specs[i])
    }

    fn refresh_active(&mut self, t: usize) -> Result<()> {
        let Some(top) = max_index_below(ln_t(t)) else {
            return Ok(());
        };
        let level = clip_level(t, self.space.alpha());
        for i in 0..=top {
            if self.is_active.get(i).copied().unwrap_or(false) {
                continue;
            }
            let spec = self.spec(i)?.clone();
            let mut ok = true;
            for (l, _) in &spec {
                match self.label(*l)? {
                    Some(d) if d <= level => {}
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                if self.is_active.len() <= i {
                    self.is_active.resize(i + 1, false);
                }
                self.is_active[i] = true;
                self.active.push(i);
                self.sel.activate(t);
            }
        }
        Ok(())
    }

    /// Family indices in slot order.
    pub fn active_functions(&self) -> &[usize] {
        &self.active
    }

    pub fn family_spec(&mut self, i: usize) -> Result<FunctionSpec> {
        self.spec(i).cloned()
    }

    /// Value of family member `i` at `x`.
    pub fn evaluate(&mut self, i: usize, x: &X) -> Result<S::Value> {
        let spec = self.spec(i)?.clone();
        let l = spec_label(&spec, self.cells.as_ref(), x);
        self.label(l)?;
        self.labels.get(l).cloned().ok_or_else(|| {
            Error::CorruptedState(format!("label {l} missing from the dense sequence"))
        })
    }
}

impl<X, S: ValueSpace> OnlineLearner<X, S::Value> for CsLearner<X, S> {
    fn predict(&mut self, x: &X) -> Result<S::Value> {
        if self.pending {
            return Err(Error::CorruptedState(
                "predict called twice without observe".into(),
            ));
        }
        self.t += 1;
        let t = self.t;
        self.refresh_active(t)?;
        self.predictions.clear();
        for k in 0..self.active.len() {
            let v = self.evaluate(self.active[k], x)?;
            self.predictions.push(v);
        }
        let i = self.sel.choose(Self::rate(t), &mut self.rng)?;
        self.pending = true;
        Ok(self.predictions[i].clone())
    }

    fn observe(&mut self, y: &S::Value) -> Result<()> {
        if !self.pending {
            return Err(Error::CorruptedState(
                "observe called before predict".into(),
            ));
        }
        self.pending = false;
        let target = restrict(
            &self.space,
            y,
            clip_level(self.t, self.space.alpha()),
            &self.labels[0],
        );
        let losses: Vec<f64> = self
            .predictions
            .iter()
            .map(|p| self.space.loss(p, &target))
            .collect();
        self.sel.settle(&losses)?;
        Ok(())
    }
}

impl_report!(CsLearner<X, S> where S: ValueSpace);
