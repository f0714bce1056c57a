//! Exponentially weighted forecasters.
//!
//! * [`Hedge`]: fixed finite expert set, fixed rate.
//! * [`GrowingHedge`]: countable classification where the experts are the
//!   labels seen so far.
//! * [`AnytimeAggregator`]: time-varying rate with experts entering late;
//!   weights come from `η_t (L̂ - L)`. Shared by the mean estimator and the
//!   model-selection combiners.
//! * [`MeanEstimator`]: anytime mean estimation over a dense sequence.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::learner::OnlineLearner;
use crate::numeric::{ceil_nudged, ln_t, max_index_below, sample_index, softmax};
use crate::spaces::ValueSpace;

/// Finite Hedge over indexed experts.
#[derive(Clone, Debug)]
pub struct Hedge {
    eta: f64,
    cumulative: Vec<f64>,
}

impl Hedge {
    pub fn new(n: usize, eta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyExperts);
        }
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "learning rate must be finite and >= 0, got {eta}"
            )));
        }
        Ok(Self {
            eta,
            cumulative: vec![0.0; n],
        })
    }

    /// Rate minimising `ln N/η + Tηℓ̄²/8`.
    pub fn optimal_rate(n: usize, horizon: usize, max_loss: f64) -> f64 {
        if n <= 1 || horizon == 0 || max_loss <= 0.0 {
            return 0.0;
        }
        (8.0 * (n as f64).ln() / (horizon as f64 * max_loss * max_loss)).sqrt()
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn cumulative_losses(&self) -> &[f64] {
        &self.cumulative
    }

    /// Probabilities `∝ exp(-η L_i)`.
    pub fn distribution(&self) -> Vec<f64> {
        let logw: Vec<f64> = self.cumulative.iter().map(|l| -self.eta * l).collect();
        softmax(&logw)
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        sample_index(&self.distribution(), rng.gen::<f64>())
    }

    /// Adds one round of expert losses; returns the expected loss under the
    /// pre-update distribution.
    pub fn update(&mut self, losses: &[f64]) -> Result<f64> {
        if losses.len() != self.cumulative.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} losses, got {}",
                self.cumulative.len(),
                losses.len()
            )));
        }
        let p = self.distribution();
        let expected = p.iter().zip(losses).map(|(p, l)| p * l).sum();
        for (c, l) in self.cumulative.iter_mut().zip(losses) {
            *c += l;
        }
        Ok(expected)
    }
}

/// Right-hand side of the Hedge regret bound.
pub fn hedge_regret_bound(
    min_cumulative: f64,
    n: usize,
    eta: f64,
    horizon: usize,
    max_loss: f64,
) -> f64 {
    min_cumulative + (n as f64).ln() / eta + horizon as f64 * eta * max_loss * max_loss / 8.0
}

/// Hedge over a list of values of a space, played as an online learner.
#[derive(Clone, Debug)]
pub struct HedgeForecaster<S: ValueSpace> {
    space: S,
    values: Vec<S::Value>,
    hedge: Hedge,
    rng: ChaCha8Rng,
}

impl<S: ValueSpace> HedgeForecaster<S> {
    pub fn new(space: S, values: Vec<S::Value>, eta: f64, rng: ChaCha8Rng) -> Result<Self> {
        let hedge = Hedge::new(values.len(), eta)?;
        Ok(Self {
            space,
            values,
            hedge,
            rng,
        })
    }

    pub fn values(&self) -> &[S::Value] {
        &self.values
    }

    pub fn distribution(&self) -> Vec<f64> {
        self.hedge.distribution()
    }

    /// Expected loss of the next prediction against `y`.
    pub fn expected_loss(&self, y: &S::Value) -> f64 {
        self.distribution()
            .iter()
            .zip(&self.values)
            .map(|(p, v)| p * self.space.loss(v, y))
            .sum()
    }

    pub fn sample(&mut self) -> S::Value {
        let i = self.hedge.sample(&mut self.rng);
        self.values[i].clone()
    }

    pub fn update(&mut self, y: &S::Value) -> Result<f64> {
        let losses: Vec<f64> = self.values.iter().map(|v| self.space.loss(v, y)).collect();
        self.hedge.update(&losses)
    }
}

impl<X, S: ValueSpace> OnlineLearner<X, S::Value> for HedgeForecaster<S> {
    fn predict(&mut self, _x: &X) -> Result<S::Value> {
        Ok(self.sample())
    }
    fn observe(&mut self, y: &S::Value) -> Result<()> {
        self.update(y).map(|_| ())
    }
}

// ---------------------------------------------------------------------------

/// Forecaster for labels in `ℕ` whose experts are the labels already seen.
#[derive(Clone, Debug)]
pub struct GrowingHedge {
    t0: usize,
    eta: f64,
    hits: HashMap<usize, u64>,
    /// Labels in order of first appearance, for a deterministic sampling order.
    seen: Vec<usize>,
}

impl GrowingHedge {
    pub fn new(t0: usize) -> Result<Self> {
        if t0 < 2 {
            return Err(Error::InvalidParameter(format!(
                "t0 must be >= 2, got {t0}"
            )));
        }
        let eta = (2.0 * (t0 as f64).ln() / t0 as f64).sqrt();
        Ok(Self {
            t0,
            eta,
            hits: HashMap::new(),
            seen: Vec::new(),
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn t0(&self) -> usize {
        self.t0
    }

    /// Probability of predicting `label` next.
    pub fn probability(&self, label: usize) -> f64 {
        if self.seen.is_empty() {
            return if label == 0 { 1.0 } else { 0.0 };
        }
        let Some(pos) = self.seen.iter().position(|&l| l == label) else {
            return 0.0;
        };
        self.distribution()[pos]
    }

    fn distribution(&self) -> Vec<f64> {
        let logw: Vec<f64> = self
            .seen
            .iter()
            .map(|l| self.eta * self.hits[l] as f64)
            .collect();
        softmax(&logw)
    }

    pub fn predict(&self, rng: &mut ChaCha8Rng) -> usize {
        if self.seen.is_empty() {
            return 0;
        }
        self.seen[sample_index(&self.distribution(), rng.gen::<f64>())]
    }

    pub fn observe(&mut self, label: usize) {
        let c = self.hits.entry(label).or_insert(0);
        if *c == 0 {
            self.seen.push(label);
        }
        *c += 1;
    }

    /// Lower bound on `Σ ŝ_t` over `horizon` rounds given the best count.
    pub fn success_lower_bound(t0: usize, horizon: usize, best_count: u64) -> f64 {
        let t0f = t0 as f64;
        let lt = t0f.ln();
        best_count as f64
            - 1.0
            - std::f64::consts::LN_2 * (t0f / (2.0 * lt)).sqrt()
            - (lt / (2.0 * t0f)).sqrt() * (t0f + horizon as f64)
    }
}

// ---------------------------------------------------------------------------

/// Weighted aggregation of experts that enter over time. Each slot keeps the
/// sum of its own losses `L` and of the aggregate losses `L̂` since entry.
#[derive(Clone, Debug, Default)]
pub struct AnytimeAggregator {
    true_loss: Vec<f64>,
    est_loss: Vec<f64>,
    entry: Vec<usize>,
}

impl AnytimeAggregator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Opens a new slot at time `t` with zero sums; returns its position.
    pub fn activate(&mut self, t: usize) -> usize {
        self.true_loss.push(0.0);
        self.est_loss.push(0.0);
        self.entry.push(t);
        self.true_loss.len() - 1
    }

    pub fn len(&self) -> usize {
        self.true_loss.len()
    }

    pub fn is_empty(&self) -> bool {
        self.true_loss.is_empty()
    }

    pub fn entry_time(&self, slot: usize) -> usize {
        self.entry[slot]
    }

    pub fn true_loss(&self, slot: usize) -> f64 {
        self.true_loss[slot]
    }

    pub fn estimated_loss(&self, slot: usize) -> f64 {
        self.est_loss[slot]
    }

    /// Probabilities `∝ exp(η (L̂_i - L_i))` over all slots.
    pub fn probabilities(&self, eta: f64) -> Result<Vec<f64>> {
        if self.true_loss.is_empty() {
            return Err(Error::EmptyExperts);
        }
        let logw: Vec<f64> = self
            .est_loss
            .iter()
            .zip(&self.true_loss)
            .map(|(e, l)| eta * (e - l))
            .collect();
        Ok(softmax(&logw))
    }

    /// Adds a round: `ℓ̂ = Σ p_i ℓ_i`, then every slot gets `ℓ_i` and `ℓ̂`.
    pub fn update(&mut self, probs: &[f64], losses: &[f64]) -> Result<f64> {
        if probs.len() != self.len() || losses.len() != self.len() {
            return Err(Error::CorruptedState(format!(
                "aggregator has {} slots, got {} probabilities and {} losses",
                self.len(),
                probs.len(),
                losses.len()
            )));
        }
        let lhat: f64 = probs.iter().zip(losses).map(|(p, l)| p * l).sum();
        for i in 0..self.len() {
            self.true_loss[i] += losses[i];
            self.est_loss[i] += lhat;
        }
        Ok(lhat)
    }
}

// ---------------------------------------------------------------------------

/// Anytime mean estimation over the dense sequence of a space.
///
/// Index `i` is active at time `t` when `i <= ln t`, `ℓ(y^0, y^i) <= ln t`
/// and `t >= ⌈max(e^i, e^{ℓ(y^0,y^i)})⌉`. The rate is `1/(4√t)`.
#[derive(Clone, Debug)]
pub struct MeanEstimator<S: ValueSpace> {
    space: S,
    rng: ChaCha8Rng,
    t: usize,
    points: Vec<S::Value>,
    anchor_loss: Vec<f64>,
    /// slot → dense index
    active: Vec<usize>,
    is_active: Vec<bool>,
    exhausted_at: Option<usize>,
    agg: AnytimeAggregator,
    last_probs: Vec<f64>,
    pending: bool,
}

impl<S: ValueSpace> MeanEstimator<S> {
    pub fn new(space: S, rng: ChaCha8Rng) -> Result<Self> {
        let y0 = space.dense_point(0)?.ok_or(Error::MissingDenseSequence)?;
        Ok(Self {
            space,
            rng,
            t: 0,
            points: vec![y0],
            anchor_loss: vec![0.0],
            active: Vec::new(),
            is_active: Vec::new(),
            exhausted_at: None,
            agg: AnytimeAggregator::new(),
            last_probs: Vec::new(),
            pending: false,
        })
    }

    pub fn space(&self) -> &S {
        &self.space
    }

    /// Entry time `⌈max(e^i, e^ℓ)⌉` of an index with anchor loss `l`.
    pub fn entry_time(i: usize, anchor_loss: f64) -> f64 {
        ceil_nudged((i as f64).max(anchor_loss).exp()).max(1.0)
    }

    /// Dense point `i`, fetched once.
    fn point(&mut self, i: usize) -> Result<Option<usize>> {
        while self.points.len() <= i {
            if self.exhausted_at.is_some() {
                return Ok(None);
            }
            let k = self.points.len();
            match self.space.dense_point(k)? {
                Some(v) => {
                    self.anchor_loss.push(self.space.loss(&self.points[0], &v));
                    self.points.push(v);
                }
                None => {
                    self.exhausted_at = Some(k);
                    return Ok(None);
                }
            }
        }
        Ok(Some(i))
    }

    fn refresh_active(&mut self, t: usize) -> Result<()> {
        let lt = ln_t(t);
        let Some(top) = max_index_below(lt) else {
            return Ok(());
        };
        for i in 0..=top {
            if i < self.is_active.len() && self.is_active[i] {
                continue;
            }
            if self.point(i)?.is_none() {
                break;
            }
            let l = self.anchor_loss[i];
            if l <= lt && t as f64 >= Self::entry_time(i, l) {
                if self.is_active.len() <= i {
                    self.is_active.resize(i + 1, false);
                }
                self.is_active[i] = true;
                self.active.push(i);
                self.agg.activate(t);
            }
        }
        Ok(())
    }

    /// Dense indices active at the current round, in activation order.
    pub fn active_indices(&self) -> &[usize] {
        &self.active
    }

    /// Sampling probabilities of the current round, aligned with
    /// [`Self::active_indices`].
    pub fn probabilities(&self) -> &[f64] {
        &self.last_probs
    }

    pub fn dense_value(&self, i: usize) -> Option<&S::Value> {
        self.points.get(i)
    }

    pub fn time(&self) -> usize {
        self.t
    }

    /// Prepares round `t+1` and returns its distribution over active indices.
    pub fn begin_round(&mut self) -> Result<()> {
        if self.pending {
            return Err(Error::CorruptedState("round already open".into()));
        }
        self.t += 1;
        self.refresh_active(self.t)?;
        let eta = 1.0 / (4.0 * (self.t as f64).sqrt());
        self.last_probs = self.agg.probabilities(eta)?;
        self.pending = true;
        Ok(())
    }

    pub fn draw(&mut self) -> S::Value {
        let slot = sample_index(&self.last_probs, self.rng.gen::<f64>());
        self.points[self.active[slot]].clone()
    }

    /// Closes the round with the revealed response; returns `ℓ̂_t`.
    pub fn finish_round(&mut self, y: &S::Value) -> Result<f64> {
        if !self.pending {
            return Err(Error::CorruptedState("no open round".into()));
        }
        self.pending = false;
        let losses: Vec<f64> = self
            .active
            .iter()
            .map(|&i| self.space.loss(&self.points[i], y))
            .collect();
        self.agg.update(&self.last_probs, &losses)
    }

    pub fn aggregator(&self) -> &AnytimeAggregator {
        &self.agg
    }
}

impl<X, S: ValueSpace> OnlineLearner<X, S::Value> for MeanEstimator<S> {
    fn predict(&mut self, _x: &X) -> Result<S::Value> {
        self.begin_round()?;
        Ok(self.draw())
    }

    fn observe(&mut self, y: &S::Value) -> Result<()> {
        self.finish_round(y).map(|_| ())
    }
}
