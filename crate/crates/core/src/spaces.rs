//! Value spaces: a metric with a loss exponent, plus the optional structure
//! (finite nets, dense sequences) that individual learners need.
//!
//! Nets returned by [`ValueSpace::epsilon_net`] are in distance terms. A net
//! covering at loss radius `eps` is obtained through [`loss_net`], which asks
//! for distance radius `eps^(1/alpha)`.

use std::fmt::Debug;

use crate::error::{Error, Result};

pub trait ValueSpace: Send + Sync {
    type Value: Clone + Debug + PartialEq + Send + Sync;

    fn distance(&self, a: &Self::Value, b: &Self::Value) -> f64;

    /// Loss exponent; the loss is `distance^alpha`.
    fn alpha(&self) -> f64;

    fn loss(&self, a: &Self::Value, b: &Self::Value) -> f64 {
        let d = self.distance(a, b);
        if self.alpha() == 1.0 {
            d
        } else {
            d.powf(self.alpha())
        }
    }

    /// Supremum of the loss, `None` when unbounded.
    fn max_loss(&self) -> Option<f64>;

    /// Finite cover at distance radius `eps`.
    fn epsilon_net(&self, _eps: f64) -> Result<Vec<Self::Value>> {
        Err(Error::UnsupportedNet)
    }

    /// The `i`-th point of the dense sequence, `Ok(None)` past the end of a
    /// finite sequence.
    fn dense_point(&self, _i: usize) -> Result<Option<Self::Value>> {
        Err(Error::MissingDenseSequence)
    }

    /// The distinguished value `y^0`.
    fn anchor(&self) -> Self::Value;
}

/// Net covering the space at loss radius `eps`.
pub fn loss_net<S: ValueSpace>(space: &S, eps: f64) -> Result<Vec<S::Value>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "net radius must be positive, got {eps}"
        )));
    }
    space.epsilon_net(eps.powf(1.0 / space.alpha()))
}

/// `c` with `(a+b)^alpha <= (1+eps) a^alpha + c b^alpha` for all `a, b >= 0`.
pub fn relaxed_triangle_constant(alpha: f64, eps: f64) -> Result<f64> {
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "alpha must be >= 1, got {alpha}"
        )));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1], got {eps}"
        )));
    }
    let r = (1.0 + eps).powf(1.0 / alpha) - 1.0;
    Ok((1.0 + 1.0 / r).powf(alpha))
}

/// Returns `y` when `loss(anchor, y) < level`, the anchor otherwise.
pub fn restrict<S: ValueSpace>(space: &S, y: &S::Value, level: f64, anchor: &S::Value) -> S::Value {
    if space.loss(anchor, y) < level {
        y.clone()
    } else {
        anchor.clone()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha must be >= 1, got {alpha}"
        )))
    }
}

// ---------------------------------------------------------------------------
// Real line

/// `ℝ` with `|a-b|^alpha`. Unbounded, so no nets.
#[derive(Clone, Debug)]
pub struct RealLine {
    alpha: f64,
}

impl RealLine {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha })
    }
}

/// Dyadic enumeration of ℝ: 0, then for each level `L >= 1` the multiples of
/// `2^-(L-1)` with `|v| <= L` not listed before, by increasing `|v|`, `+v`
/// before `-v`.
#[derive(Clone, Debug, Default)]
pub struct DyadicLine {
    level: u32,
    m: u64,
    negative_next: bool,
    started: bool,
}

impl Iterator for DyadicLine {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if !self.started {
            self.started = true;
            self.level = 1;
            self.m = 0;
            return Some(0.0);
        }
        loop {
            if self.negative_next {
                self.negative_next = false;
                return Some(-(self.m as f64) / (1u64 << (self.level - 1)) as f64);
            }
            let denom = 1u64 << (self.level - 1);
            self.m += 1;
            if self.m > self.level as u64 * denom {
                self.level += 1;
                self.m = 0;
                continue;
            }
            let fresh =
                self.m % 2 == 1 || self.level == 1 || self.m > (self.level as u64 - 1) * denom;
            if fresh {
                self.negative_next = true;
                return Some(self.m as f64 / denom as f64);
            }
        }
    }
}

impl ValueSpace for RealLine {
    type Value = f64;

    fn distance(&self, a: &f64, b: &f64) -> f64 {
        (a - b).abs()
    }
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn max_loss(&self) -> Option<f64> {
        None
    }
    fn dense_point(&self, i: usize) -> Result<Option<f64>> {
        Ok(DyadicLine::default().nth(i))
    }
    fn anchor(&self) -> f64 {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Interval

#[derive(Clone, Debug)]
pub struct Interval {
    lo: f64,
    hi: f64,
    alpha: f64,
    anchor: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bad interval [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            lo,
            hi,
            alpha,
            anchor: lo,
        })
    }

    pub fn unit(alpha: f64) -> Result<Self> {
        Self::new(0.0, 1.0, alpha)
    }

    pub fn with_anchor(mut self, anchor: f64) -> Result<Self> {
        if !(self.lo..=self.hi).contains(&anchor) {
            return Err(Error::InvalidParameter(format!(
                "anchor {anchor} outside interval"
            )));
        }
        self.anchor = anchor;
        Ok(self)
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn clamp(&self, y: f64) -> f64 {
        y.clamp(self.lo, self.hi)
    }
}

impl ValueSpace for Interval {
    type Value = f64;

    fn distance(&self, a: &f64, b: &f64) -> f64 {
        (a - b).abs()
    }
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn max_loss(&self) -> Option<f64> {
        Some((self.hi - self.lo).powf(self.alpha))
    }

    /// `m = floor(width / 2eps) + 1` equal pieces; endpoints of the pieces
    /// cover at radius `width / 2m < eps`.
    fn epsilon_net(&self, eps: f64) -> Result<Vec<f64>> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "net radius must be positive, got {eps}"
            )));
        }
        let width = self.hi - self.lo;
        let m = (width / (2.0 * eps)).floor() as usize + 1;
        Ok((0..=m)
            .map(|k| self.lo + width * k as f64 / m as f64)
            .collect())
    }

    /// Anchor, then both endpoints, then dyadic midpoints level by level.
    fn dense_point(&self, i: usize) -> Result<Option<f64>> {
        let width = self.hi - self.lo;
        let mut seen = 0usize;
        let mut emitted: Vec<f64> = Vec::with_capacity(i + 1);
        let mut push = |v: f64, emitted: &mut Vec<f64>| -> Option<f64> {
            if emitted.iter().any(|e| e.to_bits() == v.to_bits()) {
                return None;
            }
            emitted.push(v);
            if seen == i {
                return Some(v);
            }
            seen += 1;
            None
        };
        for v in [self.anchor, self.lo, self.hi] {
            if let Some(found) = push(v, &mut emitted) {
                return Ok(Some(found));
            }
        }
        let mut level = 1u32;
        loop {
            let denom = 1u64 << level;
            for m in (1..denom).step_by(2) {
                let v = self.lo + width * m as f64 / denom as f64;
                if let Some(found) = push(v, &mut emitted) {
                    return Ok(Some(found));
                }
            }
            level += 1;
        }
    }

    fn anchor(&self) -> f64 {
        self.anchor
    }
}

// ---------------------------------------------------------------------------
// Unit disk

#[derive(Clone, Debug)]
pub struct UnitDisk {
    alpha: f64,
}

impl UnitDisk {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha })
    }

    /// The three cube roots of unity.
    pub fn triangle() -> [[f64; 2]; 3] {
        let h = 3f64.sqrt() / 2.0;
        [[1.0, 0.0], [-0.5, h], [-0.5, -h]]
    }

    fn project(p: [f64; 2]) -> [f64; 2] {
        let r = p[0].hypot(p[1]);
        if r > 1.0 {
            [p[0] / r, p[1] / r]
        } else {
            p
        }
    }
}

fn dedup_points(points: &mut Vec<[f64; 2]>) {
    let mut keep: Vec<[f64; 2]> = Vec::with_capacity(points.len());
    for p in points.drain(..) {
        if !keep
            .iter()
            .any(|q| q[0].to_bits() == p[0].to_bits() && q[1].to_bits() == p[1].to_bits())
        {
            keep.push(p);
        }
    }
    *points = keep;
}

impl ValueSpace for UnitDisk {
    type Value = [f64; 2];

    fn distance(&self, a: &[f64; 2], b: &[f64; 2]) -> f64 {
        (a[0] - b[0]).hypot(a[1] - b[1])
    }
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn max_loss(&self) -> Option<f64> {
        Some(2f64.powf(self.alpha))
    }

    /// Square grid over `[-1,1]^2` with step below `sqrt(2) eps`, points
    /// outside the disk pulled radially onto the circle. Radial projection
    /// onto the disk is non-expansive, so the cover survives it.
    fn epsilon_net(&self, eps: f64) -> Result<Vec<[f64; 2]>> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "net radius must be positive, got {eps}"
            )));
        }
        let n = (2.0 / (std::f64::consts::SQRT_2 * eps)).floor() as usize + 1;
        let mut pts = Vec::with_capacity((n + 1) * (n + 1));
        for i in 0..=n {
            for j in 0..=n {
                let p = [
                    -1.0 + 2.0 * i as f64 / n as f64,
                    -1.0 + 2.0 * j as f64 / n as f64,
                ];
                pts.push(Self::project(p));
            }
        }
        dedup_points(&mut pts);
        Ok(pts)
    }

    /// Centre, then lattice levels of step `2^-(L-1)` inside the disk,
    /// each level sorted by radius then angle, coarser points not repeated.
    fn dense_point(&self, i: usize) -> Result<Option<[f64; 2]>> {
        if i == 0 {
            return Ok(Some([0.0, 0.0]));
        }
        let mut remaining = i - 1;
        let mut level = 1u32;
        loop {
            let scale = 1i64 << (level - 1);
            let mut ring: Vec<(i64, i64)> = Vec::new();
            for a in -scale..=scale {
                for b in -scale..=scale {
                    let fresh = level == 1 || a % 2 != 0 || b % 2 != 0;
                    if fresh && a * a + b * b <= scale * scale && (a, b) != (0, 0) {
                        ring.push((a, b));
                    }
                }
            }
            ring.sort_by(|p, q| {
                let rp = p.0 * p.0 + p.1 * p.1;
                let rq = q.0 * q.0 + q.1 * q.1;
                let ang = |v: &(i64, i64)| {
                    let t = (v.1 as f64).atan2(v.0 as f64);
                    if t < 0.0 {
                        t + std::f64::consts::TAU
                    } else {
                        t
                    }
                };
                rp.cmp(&rq).then(ang(p).total_cmp(&ang(q)))
            });
            if remaining < ring.len() {
                let (a, b) = ring[remaining];
                return Ok(Some([a as f64 / scale as f64, b as f64 / scale as f64]));
            }
            remaining -= ring.len();
            level += 1;
        }
    }

    fn anchor(&self) -> [f64; 2] {
        [0.0, 0.0]
    }
}

// ---------------------------------------------------------------------------
// Label spaces

/// `{0, ..., n-1}` with the 0-1 loss.
#[derive(Clone, Debug)]
pub struct FiniteLabels {
    n: usize,
}

impl FiniteLabels {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "label set must be non-empty".into(),
            ));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

impl ValueSpace for FiniteLabels {
    type Value = usize;

    fn distance(&self, a: &usize, b: &usize) -> f64 {
        if a == b {
            0.0
        } else {
            1.0
        }
    }
    fn alpha(&self) -> f64 {
        1.0
    }
    fn max_loss(&self) -> Option<f64> {
        Some(if self.n > 1 { 1.0 } else { 0.0 })
    }
    fn epsilon_net(&self, eps: f64) -> Result<Vec<usize>> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "net radius must be positive, got {eps}"
            )));
        }
        if eps > 1.0 {
            Ok(vec![0])
        } else {
            Ok((0..self.n).collect())
        }
    }
    fn dense_point(&self, i: usize) -> Result<Option<usize>> {
        Ok((i < self.n).then_some(i))
    }
    fn anchor(&self) -> usize {
        0
    }
}

/// `ℕ` with the 0-1 loss: bounded but not totally bounded.
#[derive(Clone, Debug, Default)]
pub struct CountableLabels;

impl ValueSpace for CountableLabels {
    type Value = usize;

    fn distance(&self, a: &usize, b: &usize) -> f64 {
        if a == b {
            0.0
        } else {
            1.0
        }
    }
    fn alpha(&self) -> f64 {
        1.0
    }
    fn max_loss(&self) -> Option<f64> {
        Some(1.0)
    }
    fn dense_point(&self, i: usize) -> Result<Option<usize>> {
        Ok(Some(i))
    }
    fn anchor(&self) -> usize {
        0
    }
}

/// Finite metric space given by its distance matrix.
#[derive(Clone, Debug)]
pub struct DiscreteMetric {
    dist: Vec<Vec<f64>>,
    alpha: f64,
}

impl DiscreteMetric {
    pub fn new(dist: Vec<Vec<f64>>, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let n = dist.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty distance matrix".into()));
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidParameter(
                    "distance matrix is not square".into(),
                ));
            }
            for (j, d) in row.iter().enumerate() {
                let ok = d.is_finite() && *d >= 0.0 && (*d == 0.0) == (i == j) && *d == dist[j][i];
                if !ok {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({i},{j}) breaks the metric axioms"
                    )));
                }
            }
        }
        Ok(Self { dist, alpha })
    }

    /// Points on a line with the induced metric.
    pub fn from_line(points: &[f64], alpha: f64) -> Result<Self> {
        let dist = points
            .iter()
            .map(|a| points.iter().map(|b| (a - b).abs()).collect())
            .collect();
        Self::new(dist, alpha)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }
}

impl ValueSpace for DiscreteMetric {
    type Value = usize;

    fn distance(&self, a: &usize, b: &usize) -> f64 {
        self.dist[*a][*b]
    }
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn max_loss(&self) -> Option<f64> {
        let d = self.dist.iter().flatten().copied().fold(0.0, f64::max);
        Some(d.powf(self.alpha))
    }

    /// Greedy cover: scan points in order, keep any not yet within `eps`.
    fn epsilon_net(&self, eps: f64) -> Result<Vec<usize>> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "net radius must be positive, got {eps}"
            )));
        }
        let mut net: Vec<usize> = Vec::new();
        for p in 0..self.len() {
            if !net.iter().any(|&q| self.dist[p][q] <= eps) {
                net.push(p);
            }
        }
        Ok(net)
    }
    fn dense_point(&self, i: usize) -> Result<Option<usize>> {
        Ok((i < self.len()).then_some(i))
    }
    fn anchor(&self) -> usize {
        0
    }
}

// ---------------------------------------------------------------------------
// Pathological space

/// `n_k = 2k(k-1) + 2^k - 1`.
pub fn patho_n(k: u32) -> u64 {
    let k64 = k as u64;
    2 * k64 * (k64 - 1) + (1u64 << k) - 1
}

/// `(n_k, I_k, J_k)` with `I_k = [n_k, n_k + 4k)` and `J_k = [n_k + 4k, n_{k+1})`.
pub fn patho_partition(k: u32) -> Result<(u64, std::ops::Range<u64>, std::ops::Range<u64>)> {
    if k == 0 || k > 60 {
        return Err(Error::InvalidParameter(format!(
            "block index must lie in 1..=60, got {k}"
        )));
    }
    let n = patho_n(k);
    let mid = n + 4 * k as u64;
    Ok((n, n..mid, mid..patho_n(k + 1)))
}

/// Block containing `i`, or `None` for `i = 0`.
pub fn patho_block(i: u64) -> Option<u32> {
    if i == 0 {
        return None;
    }
    let mut k = 1;
    while patho_n(k + 1) <= i {
        k += 1;
    }
    Some(k)
}

/// Loss on the pathological countable space.
pub fn patho_loss(i: u64, j: u64) -> f64 {
    if i == j {
        return 0.0;
    }
    match (patho_block(i), patho_block(j)) {
        (Some(ki), Some(kj)) if ki == kj => {
            let k = ki;
            let n = patho_n(k);
            let mid = n + 4 * k as u64;
            let (a, b) = if i < mid && j >= mid {
                (i, j)
            } else if j < mid && i >= mid {
                (j, i)
            } else {
                return 1.0;
            };
            let offset = a - n;
            let (u, r) = (offset / 4, offset % 4);
            let bit = ((b - mid) >> u) & 1;
            if r < 2 {
                (1.0 + bit as f64) / 2.0
            } else {
                (2.0 - bit as f64) / 2.0
            }
        }
        _ => 1.0,
    }
}

#[derive(Clone, Debug, Default)]
pub struct PathologicalSpace;

impl ValueSpace for PathologicalSpace {
    type Value = u64;

    fn distance(&self, a: &u64, b: &u64) -> f64 {
        patho_loss(*a, *b)
    }
    fn alpha(&self) -> f64 {
        1.0
    }
    fn loss(&self, a: &u64, b: &u64) -> f64 {
        patho_loss(*a, *b)
    }
    fn max_loss(&self) -> Option<f64> {
        Some(1.0)
    }
    fn dense_point(&self, i: usize) -> Result<Option<u64>> {
        Ok(Some(i as u64))
    }
    fn anchor(&self) -> u64 {
        0
    }
}
