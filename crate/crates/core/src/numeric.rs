//! Float helpers shared by the index-set computations.

/// Slack applied before rounding so that values like `e^i` computed with a
/// last-bit error do not jump to the next integer.
pub const ROUNDING_SLACK: f64 = 1e-12;

/// `⌈x⌉` after a small downward nudge.
pub fn ceil_nudged(x: f64) -> f64 {
    (x - ROUNDING_SLACK).ceil()
}

/// `⌊x⌋` after a small upward nudge.
pub fn floor_nudged(x: f64) -> f64 {
    (x + ROUNDING_SLACK).floor()
}

/// Largest integer `i` with `i <= bound` (bound nudged up), or `None` when the
/// bound is negative.
pub fn max_index_below(bound: f64) -> Option<usize> {
    let f = floor_nudged(bound);
    if f < 0.0 {
        None
    } else {
        Some(f as usize)
    }
}

/// Natural log of a 1-indexed time step.
pub fn ln_t(t: usize) -> f64 {
    (t as f64).ln()
}

/// Normalises log-weights into probabilities without overflow.
pub fn softmax(log_weights: &[f64]) -> Vec<f64> {
    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        let n = log_weights.len().max(1) as f64;
        return vec![1.0 / n; log_weights.len()];
    }
    let mut w: Vec<f64> = log_weights.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    for v in &mut w {
        *v /= total;
    }
    w
}

/// Inverse-CDF draw from a probability vector using a single uniform `u`.
pub fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // u fell into the rounding gap at the top; take the last positive entry
    probs
        .iter()
        .rposition(|p| *p > 0.0)
        .unwrap_or(probs.len().saturating_sub(1))
}

/// `log2(2^a + 2^b)` evaluated stably.
pub fn log2_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (1.0 + (lo - hi).exp2()).log2()
}
