//! Response generators behind the lower bounds, and the empirical
//! integrability diagnostic.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::{floor_nudged, log2_add};
use crate::spaces::{patho_loss, patho_partition, ValueSpace};

/// A response mechanism. Adaptive scripts may read past predictions;
/// oblivious scripts must ignore them.
pub trait AdversaryScript<X, Y> {
    fn is_oblivious(&self) -> bool;
    fn respond(&mut self, t: usize, x: &X, past_predictions: &[Y]) -> Y;
}

// ---------------------------------------------------------------------------
// Equilateral triangle on the unit disk

/// I.i.d. uniform over the cube roots of unity.
#[derive(Clone, Debug)]
pub struct TriangleAdversary {
    rng: ChaCha8Rng,
}

impl TriangleAdversary {
    pub fn new(rng: ChaCha8Rng) -> Self {
        Self { rng }
    }

    pub fn vertices() -> [[f64; 2]; 3] {
        crate::spaces::UnitDisk::triangle()
    }

    pub fn next_vertex(&mut self) -> usize {
        self.rng.gen_range(0..3)
    }

    /// Expected loss `(0 + √3 + √3)/3` of always predicting a vertex.
    pub fn vertex_expected_loss() -> f64 {
        2.0 * 3f64.sqrt() / 3.0
    }
}

impl<X> AdversaryScript<X, [f64; 2]> for TriangleAdversary {
    fn is_oblivious(&self) -> bool {
        true
    }
    fn respond(&mut self, _t: usize, _x: &X, _past: &[[f64; 2]]) -> [f64; 2] {
        Self::vertices()[self.next_vertex()]
    }
}

// ---------------------------------------------------------------------------
// Pathological space

/// Step `u` (1-based) of block `k` with bits `(b, c)`:
/// `n_k + 4(u-1) + 2b + c`.
pub fn patho_response(k: u32, u: u32, b: bool, c: bool) -> u64 {
    let (n, _, _) = patho_partition(k).expect("validated block index");
    n + 4 * (u as u64 - 1) + 2 * b as u64 + c as u64
}

/// `n_k + 4k + Σ_u b_u 2^{u-1}`.
pub fn patho_comparator(k: u32, bits: &[bool]) -> u64 {
    let (_, _, j) = patho_partition(k).expect("validated block index");
    j.start
        + bits
            .iter()
            .enumerate()
            .map(|(u, b)| (*b as u64) << u)
            .sum::<u64>()
}

/// Expected loss of a fixed prediction `y` at step `u` over the four bit pairs.
pub fn patho_expected_loss(k: u32, u: u32, y: u64) -> f64 {
    let mut s = 0.0;
    for b in [false, true] {
        for c in [false, true] {
            s += patho_loss(y, patho_response(k, u, b, c));
        }
    }
    s / 4.0
}

/// The hard sequence for block `k`: `k` responses and their hindsight
/// comparator.
#[derive(Clone, Debug)]
pub struct PathoAdversary {
    k: u32,
    b: Vec<bool>,
    c: Vec<bool>,
}

impl PathoAdversary {
    pub fn new(k: u32, rng: &mut ChaCha8Rng) -> Result<Self> {
        patho_partition(k)?;
        if k > 40 {
            return Err(Error::InvalidParameter(format!(
                "block index {k} too large for comparator bits"
            )));
        }
        let mut b = Vec::with_capacity(k as usize);
        let mut c = Vec::with_capacity(k as usize);
        for _ in 0..k {
            b.push(rng.gen::<bool>());
            c.push(rng.gen::<bool>());
        }
        Ok(Self { k, b, c })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn responses(&self) -> Vec<u64> {
        (1..=self.k)
            .map(|u| patho_response(self.k, u, self.b[u as usize - 1], self.c[u as usize - 1]))
            .collect()
    }

    pub fn comparator(&self) -> u64 {
        patho_comparator(self.k, &self.b)
    }
}

// ---------------------------------------------------------------------------
// Super-exponential responses in log domain

/// A signed real stored as `(sign, log2 |y|)`. Zero has sign 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogReal {
    pub sign: i8,
    pub log2_abs: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        sign: 0,
        log2_abs: f64::NEG_INFINITY,
    };

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: if v > 0.0 { 1 } else { -1 },
                log2_abs: v.abs().log2(),
            }
        }
    }

    pub fn pow2(sign: i8, exponent: f64) -> Self {
        Self {
            sign,
            log2_abs: exponent,
        }
    }
}

/// `log2(1 - 2^-m)` for `m > 0`.
fn log2_one_minus_pow2(m: f64) -> f64 {
    if m > 1000.0 {
        -(-m).exp2() / std::f64::consts::LN_2
    } else {
        (-(-m).exp2()).ln_1p() / std::f64::consts::LN_2
    }
}

/// `log2 |a - b|`, `-inf` when equal.
pub fn log2_abs_diff(a: LogReal, b: LogReal) -> f64 {
    if a.sign == 0 {
        return b.log2_abs;
    }
    if b.sign == 0 {
        return a.log2_abs;
    }
    if a.sign != b.sign {
        return log2_add(a.log2_abs, b.log2_abs);
    }
    let (hi, lo) = if a.log2_abs >= b.log2_abs {
        (a.log2_abs, b.log2_abs)
    } else {
        (b.log2_abs, a.log2_abs)
    };
    if hi == lo {
        return f64::NEG_INFINITY;
    }
    hi + log2_one_minus_pow2(hi - lo)
}

/// `log2 ℓ(a, b) = α log2 |a - b|`.
pub fn log2_loss(alpha: f64, a: LogReal, b: LogReal) -> f64 {
    alpha * log2_abs_diff(a, b)
}

/// `log2( |y|^α - (|y|-1)^α )` for `y = 2^m`, the gap between predicting 0
/// and predicting 1 against a positive response.
pub fn log2_sign_gap(alpha: f64, m: f64) -> f64 {
    // |y|^α (1 - (1 - 2^-m)^α)
    let tail = if m > 1000.0 {
        alpha.log2() - m
    } else {
        let inner = alpha * (-(-m).exp2()).ln_1p();
        (-inner.exp_m1()).log2()
    };
    alpha * m + tail
}

/// `β = 2α/(α-1)`.
pub fn superexp_beta(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "alpha must exceed 1, got {alpha}"
        )));
    }
    Ok(2.0 * alpha / (alpha - 1.0))
}

/// `Y_t = b_t 2^{β^t}` with Rademacher signs.
#[derive(Clone, Debug)]
pub struct SuperexpAdversary {
    alpha: f64,
    beta: f64,
    rng: ChaCha8Rng,
}

impl SuperexpAdversary {
    pub fn new(alpha: f64, rng: ChaCha8Rng) -> Result<Self> {
        Ok(Self {
            alpha,
            beta: superexp_beta(alpha)?,
            rng,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `log2 |Y_t| = β^t`; fails once the exponent is no longer an exact
    /// double.
    pub fn exponent(&self, t: u32) -> Result<f64> {
        let e = self.beta.powi(t as i32);
        if e > 2f64.powi(53) {
            return Err(Error::Overflow(format!(
                "exponent β^{t} = {e:e} exceeds 2^53"
            )));
        }
        Ok(e)
    }

    pub fn next(&mut self, t: u32) -> Result<LogReal> {
        let e = self.exponent(t)?;
        let sign = if self.rng.gen::<bool>() { 1 } else { -1 };
        Ok(LogReal::pow2(sign, e))
    }
}

/// Outcome of comparing one sign mistake at step `T` with the comparator's
/// earlier cost.
#[derive(Clone, Copy, Debug)]
pub struct SignDominance {
    /// `log2( ℓ(0, Y_T) - ℓ(1, Y_T) )`.
    pub log2_gap: f64,
    /// `log2( T Σ_{t<T} ℓ(1, -|Y_t|) )`.
    pub log2_prior: f64,
}

impl SignDominance {
    pub fn holds(&self) -> bool {
        self.log2_gap > self.log2_prior
    }
}

pub fn sign_mistake_dominance(alpha: f64, horizon: u32) -> Result<SignDominance> {
    let beta = superexp_beta(alpha)?;
    let adv_exp = |t: u32| -> Result<f64> {
        let e = beta.powi(t as i32);
        if e > 2f64.powi(53) {
            Err(Error::Overflow(format!("exponent β^{t} exceeds 2^53")))
        } else {
            Ok(e)
        }
    };
    let gap = log2_sign_gap(alpha, adv_exp(horizon)?);
    let one = LogReal::from_f64(1.0);
    let mut prior = f64::NEG_INFINITY;
    for t in 1..horizon {
        let y = LogReal::pow2(-1, adv_exp(t)?);
        prior = log2_add(prior, log2_loss(alpha, one, y));
    }
    Ok(SignDominance {
        log2_gap: gap,
        log2_prior: (horizon as f64).log2() + prior,
    })
}

// ---------------------------------------------------------------------------
// Sparse spikes with convergent relative frequencies

/// Spike times `t_k = ⌊Σ_{l<=k} ℓ(y_0, y_l)⌋` on the real line with
/// `y_k = 2^{k/α}`, so `t_k = 2^{k+1} - 2`.
#[derive(Clone, Debug)]
pub struct CrfAdversary {
    alpha: f64,
    horizon: usize,
    bits: Vec<bool>,
    spike_times: Vec<usize>,
}

impl CrfAdversary {
    pub fn new(alpha: f64, horizon: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        if !(alpha >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be >= 1, got {alpha}"
            )));
        }
        let mut spike_times = vec![0usize];
        let mut bits = vec![false];
        let mut total = 0.0;
        let mut k = 0usize;
        loop {
            k += 1;
            total += 2f64.powi(k as i32);
            let tk = floor_nudged(total) as usize;
            if tk > horizon {
                break;
            }
            spike_times.push(tk);
            bits.push(rng.gen::<bool>());
        }
        Ok(Self {
            alpha,
            horizon,
            bits,
            spike_times,
        })
    }

    pub fn spike_value(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            2f64.powf(k as f64 / self.alpha)
        }
    }

    /// `t_k` for `k >= 1` up to the horizon (index 0 unused).
    pub fn spike_times(&self) -> &[usize] {
        &self.spike_times
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Instance at time `t`: `k` at `t_k`, 0 elsewhere.
    pub fn instance(&self, t: usize) -> f64 {
        match self.spike_times[1..].binary_search(&t) {
            Ok(pos) => (pos + 1) as f64,
            Err(_) => 0.0,
        }
    }

    pub fn instances(&self) -> Vec<f64> {
        (1..=self.horizon).map(|t| self.instance(t)).collect()
    }

    /// Target `f*_B`: `y_0` at `x_0`, and at `x_k` either `y_0` or `y_k`.
    pub fn target(&self, x: f64) -> f64 {
        let k = x as usize;
        if k == 0 || k >= self.bits.len() || !self.bits[k] {
            0.0
        } else {
            self.spike_value(k)
        }
    }

    pub fn responses(&self) -> Vec<f64> {
        self.instances()
            .into_iter()
            .map(|x| self.target(x))
            .collect()
    }
}

/// Spike times `t_k` for unit growth `ℓ(y_0, y_k) = 2^k`.
pub fn crf_spike_time(k: u32) -> u64 {
    let total: f64 = (1..=k).map(|l| 2f64.powi(l as i32)).sum();
    floor_nudged(total) as u64
}

/// `(1/T) Σ ℓ(y_0, Y_t) 1[ℓ(y_0, Y_t) >= M]`.
pub fn empirical_integrability_tail<S: ValueSpace>(
    space: &S,
    responses: &[S::Value],
    anchor: &S::Value,
    level: f64,
) -> f64 {
    if responses.is_empty() {
        return 0.0;
    }
    let s: f64 = responses
        .iter()
        .map(|y| space.loss(anchor, y))
        .filter(|l| *l >= level)
        .sum();
    s / responses.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{patho_n, RealLine};
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn vertex_constant() {
        assert!((TriangleAdversary::vertex_expected_loss() - 1.1547005383792515).abs() < 1e-15);
    }

    #[test]
    fn comparator_pays_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 1..=6 {
            let a = PathoAdversary::new(k, &mut rng).unwrap();
            let j = a.comparator();
            for y in a.responses() {
                assert_eq!(patho_loss(y, j), 0.5);
            }
        }
    }

    #[test]
    fn patho_minimum_is_three_quarters() {
        let k = 3;
        for u in 1..=k {
            let best = (0..patho_n(k + 1))
                .map(|y| patho_expected_loss(k, u, y))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(best, 0.75);
        }
    }

    #[test]
    fn beta_examples() {
        assert_eq!(superexp_beta(2.0).unwrap(), 4.0);
        assert_eq!(superexp_beta(1.5).unwrap(), 6.0);
        assert!(superexp_beta(1.0).is_err());
    }

    #[test]
    fn superexp_magnitudes() {
        let a = SuperexpAdversary::new(2.0, ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(a.exponent(1).unwrap(), 4.0);
        assert_eq!(a.exponent(2).unwrap(), 16.0);
        assert_eq!(a.exponent(3).unwrap(), 64.0);
        assert!(matches!(a.exponent(40), Err(Error::Overflow(_))));
    }

    #[test]
    fn log_domain_matches_direct_arithmetic() {
        let a = LogReal::from_f64(12.0);
        let b = LogReal::from_f64(-3.5);
        assert!((log2_abs_diff(a, b) - 15.5f64.log2()).abs() < 1e-12);
        let c = LogReal::from_f64(5.0);
        assert!((log2_abs_diff(a, c) - 7f64.log2()).abs() < 1e-12);
        assert!((log2_loss(2.0, a, c) - 49f64.log2()).abs() < 1e-12);
        assert!((log2_sign_gap(2.0, 4.0) - (256.0f64 - 225.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn sign_mistake_dominates() {
        for alpha in [1.5, 2.0] {
            for t in 3..=6 {
                assert!(
                    sign_mistake_dominance(alpha, t).unwrap().holds(),
                    "alpha {alpha} T {t}"
                );
            }
        }
    }

    #[test]
    fn crf_schedule() {
        for k in 1..=20 {
            assert_eq!(crf_spike_time(k), (1u64 << (k + 1)) - 2);
        }
        let a = CrfAdversary::new(1.0, 100, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(&a.spike_times()[1..], &[2, 6, 14, 30, 62]);
        assert_eq!(a.instance(14), 3.0);
        assert_eq!(a.instance(15), 0.0);
    }

    #[test]
    fn tail_is_zero_above_bound() {
        let s = RealLine::new(1.0).unwrap();
        assert_eq!(
            empirical_integrability_tail(&s, &[0.3, -0.9, 0.5], &0.0, 2.0),
            0.0
        );
        assert_eq!(
            empirical_integrability_tail(&s, &[3.0, -0.9, 0.5, 0.0], &0.0, 2.0),
            0.75
        );
    }

    proptest! {
        #[test]
        fn superexp_ratio_is_beta(alpha in 1.2f64..4.0, t in 1u32..6) {
            let a = SuperexpAdversary::new(alpha, ChaCha8Rng::seed_from_u64(0)).unwrap();
            if let (Ok(e0), Ok(e1)) = (a.exponent(t), a.exponent(t + 1)) {
                prop_assert!((e1 / e0 - a.beta()).abs() <= 1e-12 * a.beta());
            }
        }

        #[test]
        fn crf_first_moment(seed in 0u64..500, horizon in 2usize..5000) {
            let a = CrfAdversary::new(1.0, horizon, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let ys = a.responses();
            let mut cum = 0.0;
            for (t, y) in ys.iter().enumerate() {
                cum += y.abs();
                let t = t + 1;
                prop_assert!(cum / t as f64 <= (t as f64 + 1.0) / t as f64);
            }
        }
    }
}
