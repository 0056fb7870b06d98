//! Decay-event Monte Carlo for hyperon pairs.
//!
//! Events are pairs of decay-product directions drawn from
//! `(1/4π)² (1 + α P·n₁ + ᾱ P̄·n₂ + αᾱ n₁ᵀ C n₂)` by rejection against a
//! flat envelope. Estimators invert the angular moments,
//! `⟨n₁⟩ = αP/3` and `⟨n₁n₂ᵀ⟩ = αᾱC/9`, so every Bell-operator moment
//! `Tr(ρ̂ Bⁿ)` is an average of a per-event score.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bell::{ch_operator, ChParams, MeasurementSettings};
use crate::error::{Error, Result};
use crate::linalg::{kron, paulis, Direction3, Mat2, Mat4, Real3, Vec3};
use crate::moments::{central_moments, cumulants, MomentVector};
use crate::states::TwoQubitDecomposition;

/// Events per RNG stream. Shard `s` of a batch always holds events
/// `s·SHARD_SIZE ..`, so results do not depend on how shards are run.
pub const SHARD_SIZE: usize = 1 << 16;
/// Smallest batch accepted by the moment-inversion estimators.
pub const MIN_BATCH: usize = 10_000;
/// Smallest batch for third- and fourth-order cumulants.
pub const MIN_BATCH_HIGH_ORDER: usize = 100_000;
pub const MIN_RESAMPLES: usize = 100;
/// Below this `|α|` the inversion constants `3/α`, `9/(αᾱ)` blow up.
pub const MIN_ALPHA: f64 = 0.05;

/// Proton direction `n1` and antiproton direction `n2`, each in its
/// parent's helicity frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEvent {
    pub n1: Direction3,
    pub n2: Direction3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventBatch {
    pub events: Vec<DecayEvent>,
    pub alpha_y: f64,
    pub alpha_ybar: f64,
    pub seed: u64,
    pub truth: TwoQubitDecomposition,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimatorResult {
    pub value: f64,
    pub stderr: f64,
    pub n_used: usize,
}

impl EstimatorResult {
    /// `|value − target| ≤ k·stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}

/// Flat upper bound of the joint density (in units of `(1/4π)²`).
pub fn envelope(truth: &TwoQubitDecomposition, alpha_y: f64, alpha_ybar: f64) -> f64 {
    1.0 + alpha_y.abs() * truth.p_y.norm()
        + alpha_ybar.abs() * truth.p_ybar.norm()
        + (alpha_y * alpha_ybar).abs() * truth.correlation_norm()
}

fn joint_density(
    truth: &TwoQubitDecomposition,
    alpha_y: f64,
    alpha_ybar: f64,
    n1: Vec3,
    n2: Vec3,
) -> f64 {
    let c = &truth.c;
    let mut corr = 0.0;
    for i in 0..3 {
        corr += n1[i] * (c[i][0] * n2.x + c[i][1] * n2.y + c[i][2] * n2.z);
    }
    1.0 + alpha_y * truth.p_y.dot(n1)
        + alpha_ybar * truth.p_ybar.dot(n2)
        + alpha_y * alpha_ybar * corr
}

fn uniform_sphere<R: Rng>(rng: &mut R) -> Vec3 {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let (s, c) = libm::sincos(TAU * rng.random::<f64>());
    let r = libm::sqrt((1.0 - z * z).max(0.0));
    Vec3::new(r * c, r * s, z)
}

fn shard_rng(seed: u64, shard: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    rng
}

/// Events of one shard, `count ≤ SHARD_SIZE`. Returns the events and the
/// number of proposals tried.
pub fn sample_shard(
    truth: &TwoQubitDecomposition,
    alpha_y: f64,
    alpha_ybar: f64,
    seed: u64,
    shard: usize,
    count: usize,
) -> (Vec<DecayEvent>, u64) {
    let bound = envelope(truth, alpha_y, alpha_ybar);
    let mut rng = shard_rng(seed, shard);
    let mut out = Vec::with_capacity(count);
    let mut tried = 0u64;
    // Give up early on hopeless envelopes; the caller reports the rate.
    let max_tries = (count as u64).saturating_mul(200).max(10_000);
    while out.len() < count && tried < max_tries {
        tried += 1;
        let n1 = uniform_sphere(&mut rng);
        let n2 = uniform_sphere(&mut rng);
        let u: f64 = rng.random();
        if u * bound < joint_density(truth, alpha_y, alpha_ybar, n1, n2) {
            out.push(DecayEvent { n1, n2 });
        }
    }
    (out, tried)
}

/// Number of shards for a batch and the size of shard `s`.
pub fn shard_layout(count: usize) -> impl Iterator<Item = (usize, usize)> {
    let n = count.div_ceil(SHARD_SIZE);
    (0..n).map(move |s| (s, SHARD_SIZE.min(count - s * SHARD_SIZE)))
}

/// Assembles shards produced by `sample_shard` into a batch, checking
/// the acceptance rate.
pub fn assemble_batch(
    truth: &TwoQubitDecomposition,
    alpha_y: f64,
    alpha_ybar: f64,
    seed: u64,
    count: usize,
    shards: impl IntoIterator<Item = (Vec<DecayEvent>, u64)>,
) -> Result<EventBatch> {
    let mut events = Vec::with_capacity(count);
    let mut tried = 0u64;
    for (ev, t) in shards {
        events.extend_from_slice(&ev);
        tried += t;
    }
    let rate = events.len() as f64 / tried.max(1) as f64;
    if rate < 0.01 || events.len() < count {
        return Err(Error::LowAcceptance(rate));
    }
    Ok(EventBatch {
        events,
        alpha_y,
        alpha_ybar,
        seed,
        truth: *truth,
    })
}

/// Draws `count` events. Deterministic in `(truth, alphas, count, seed)`.
pub fn sample_events(
    truth: &TwoQubitDecomposition,
    alpha_y: f64,
    alpha_ybar: f64,
    count: usize,
    seed: u64,
) -> Result<EventBatch> {
    if count == 0 {
        return Err(Error::EmptyBatch);
    }
    let shards =
        shard_layout(count).map(|(s, n)| sample_shard(truth, alpha_y, alpha_ybar, seed, s, n));
    assemble_batch(truth, alpha_y, alpha_ybar, seed, count, shards)
}

/// Per-event features `[1, n1, n2, vec(n1 n2ᵀ)]`.
pub const N_FEATURES: usize = 16;
pub type Features = [f64; N_FEATURES];

pub fn event_features(e: &DecayEvent) -> Features {
    let mut f = [0.0; N_FEATURES];
    f[0] = 1.0;
    for i in 0..3 {
        f[1 + i] = e.n1[i];
        f[4 + i] = e.n2[i];
        for j in 0..3 {
            f[7 + 3 * i + j] = e.n1[i] * e.n2[j];
        }
    }
    f
}

fn check_alphas(alpha_y: f64, alpha_ybar: f64) -> Result<()> {
    for a in [alpha_y, alpha_ybar] {
        if !(a.abs() >= MIN_ALPHA) {
            return Err(Error::AlphaTooSmall(a));
        }
    }
    Ok(())
}

fn check_size(n: usize, required: usize) -> Result<()> {
    if n < required {
        Err(Error::BatchTooSmall { size: n, required })
    } else {
        Ok(())
    }
}

/// Maps averaged features to Pauli coordinates
/// `r = [1, P, P̄, vec(C)]` of the estimated state.
fn invert(mean: &Features, alpha_y: f64, alpha_ybar: f64) -> Features {
    let mut r = [0.0; N_FEATURES];
    r[0] = mean[0];
    for i in 0..3 {
        r[1 + i] = 3.0 * mean[1 + i] / alpha_y;
        r[4 + i] = 3.0 * mean[4 + i] / alpha_ybar;
    }
    for k in 7..N_FEATURES {
        r[k] = 9.0 * mean[k] / (alpha_y * alpha_ybar);
    }
    r
}

fn decomposition_from_coords(r: &Features) -> TwoQubitDecomposition {
    let mut c: Real3 = [[0.0; 3]; 3];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = r[7 + 3 * i + j];
        }
    }
    TwoQubitDecomposition {
        p_y: Vec3::new(r[1], r[2], r[3]),
        p_ybar: Vec3::new(r[4], r[5], r[6]),
        c,
    }
}

/// Coefficients `g` with `Tr(ρ M) = Σ r_k g_k` for `r` as in `invert`.
fn pauli_weights(m: &Mat4) -> Features {
    let s = paulis();
    let id = Mat2::identity();
    let tr = |a: &Mat2, b: &Mat2| kron(a, b).trace_product(m).re / 4.0;
    let mut g = [0.0; N_FEATURES];
    g[0] = tr(&id, &id);
    for i in 0..3 {
        g[1 + i] = tr(&s[i], &id);
        g[4 + i] = tr(&id, &s[i]);
        for j in 0..3 {
            g[7 + 3 * i + j] = tr(&s[i], &s[j]);
        }
    }
    g
}

/// Per-event weights `w` with `Tr(ρ̂ M) = ⟨w·f⟩` over events.
fn score_weights(m: &Mat4, alpha_y: f64, alpha_ybar: f64) -> Features {
    let g = pauli_weights(m);
    let mut unit = [0.0; N_FEATURES];
    let mut w = [0.0; N_FEATURES];
    for k in 0..N_FEATURES {
        unit[k] = 1.0;
        w[k] = invert(&unit, alpha_y, alpha_ybar)[k] * g[k];
        unit[k] = 0.0;
    }
    w
}

fn dot(a: &Features, b: &Features) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mean feature vector of a batch.
pub fn mean_features(events: &[DecayEvent]) -> Features {
    let mut acc = [0.0; N_FEATURES];
    for e in events {
        let f = event_features(e);
        for k in 0..N_FEATURES {
            acc[k] += f[k];
        }
    }
    let n = events.len().max(1) as f64;
    acc.map(|v| v / n)
}

/// `P̂ = 3⟨n1⟩/α`, `P̄̂ = 3⟨n2⟩/ᾱ`, `Ĉ = 9⟨n1 n2ᵀ⟩/(αᾱ)`.
pub fn estimate_decomposition(batch: &EventBatch) -> Result<TwoQubitDecomposition> {
    check_alphas(batch.alpha_y, batch.alpha_ybar)?;
    check_size(batch.events.len(), MIN_BATCH)?;
    let mean = mean_features(&batch.events);
    Ok(decomposition_from_coords(&invert(
        &mean,
        batch.alpha_y,
        batch.alpha_ybar,
    )))
}

/// Mean and standard error of a linear per-event score.
fn linear_estimate(events: &[DecayEvent], w: &Features) -> EstimatorResult {
    let n = events.len();
    let (mut s, mut s2) = (0.0, 0.0);
    for e in events {
        let v = dot(w, &event_features(e));
        s += v;
        s2 += v * v;
    }
    let mean = s / n as f64;
    let var = ((s2 - s * mean) / (n as f64 - 1.0)).max(0.0);
    EstimatorResult {
        value: mean,
        stderr: libm::sqrt(var / n as f64),
        n_used: n,
    }
}

/// Plug-in `⟨B_CH⟩` on the estimated state. The estimator is linear in
/// the events, so the error is the plain standard error of the mean.
pub fn estimate_ch(
    batch: &EventBatch,
    settings: &MeasurementSettings,
    params: &ChParams,
) -> Result<EstimatorResult> {
    check_alphas(batch.alpha_y, batch.alpha_ybar)?;
    check_size(batch.events.len(), MIN_BATCH)?;
    let op = ch_operator(settings, params)?;
    let w = score_weights(&op.matrix, batch.alpha_y, batch.alpha_ybar);
    Ok(linear_estimate(&batch.events, &w))
}

/// Sample standard deviation (`n − 1`).
fn std_dev(values: impl ExactSizeIterator<Item = f64> + Clone) -> f64 {
    let n = values.len() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    libm::sqrt(ss / (n - 1.0))
}

/// Nonparametric bootstrap standard error of `statistic`.
/// Deterministic in `seed`; one resample buffer is reused.
pub fn bootstrap<T: Copy>(
    data: &[T],
    mut statistic: impl FnMut(&[T]) -> f64,
    resamples: usize,
    seed: u64,
) -> Result<f64> {
    if resamples < MIN_RESAMPLES {
        return Err(Error::TooFewResamples(resamples));
    }
    if data.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = Vec::with_capacity(data.len());
    let mut stats = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        buf.clear();
        buf.extend((0..data.len()).map(|_| data[rng.random_range(0..data.len())]));
        stats.push(statistic(&buf));
    }
    Ok(std_dev(stats.iter().copied()))
}

/// Mean feature vector of a batch together with bootstrap replicates of
/// it. Any smooth function of the features can reuse the replicates,
/// which is what makes grid scans over settings cheap.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureReplicates {
    pub mean: Features,
    pub replicates: Vec<Features>,
    pub alpha_y: f64,
    pub alpha_ybar: f64,
    pub n_events: usize,
}

/// Bootstrap replicates of the mean features. Replicate `r` draws from
/// its own stream of `seed`.
pub fn feature_replicates(
    batch: &EventBatch,
    resamples: usize,
    seed: u64,
) -> Result<FeatureReplicates> {
    check_replicate_inputs(batch, resamples)?;
    let replicates = (0..resamples)
        .map(|r| replicate_mean(&batch.events, seed, r))
        .collect();
    Ok(feature_replicates_from_parts(batch, replicates))
}

/// Preconditions of `feature_replicates`.
pub fn check_replicate_inputs(batch: &EventBatch, resamples: usize) -> Result<()> {
    if resamples < MIN_RESAMPLES {
        return Err(Error::TooFewResamples(resamples));
    }
    check_alphas(batch.alpha_y, batch.alpha_ybar)?;
    check_size(batch.events.len(), MIN_BATCH)
}

/// One bootstrap replicate of the mean features.
pub fn replicate_mean(events: &[DecayEvent], seed: u64, replicate: usize) -> Features {
    let mut rng = shard_rng(seed, replicate);
    let n = events.len();
    let mut acc = [0.0; N_FEATURES];
    for _ in 0..n {
        let e = &events[rng.random_range(0..n)];
        acc[0] += 1.0;
        for i in 0..3 {
            acc[1 + i] += e.n1[i];
            acc[4 + i] += e.n2[i];
            for j in 0..3 {
                acc[7 + 3 * i + j] += e.n1[i] * e.n2[j];
            }
        }
    }
    acc.map(|v| v / n as f64)
}

/// Wraps replicates computed elsewhere (for example in parallel).
pub fn feature_replicates_from_parts(
    batch: &EventBatch,
    replicates: Vec<Features>,
) -> FeatureReplicates {
    FeatureReplicates {
        mean: mean_features(&batch.events),
        replicates,
        alpha_y: batch.alpha_y,
        alpha_ybar: batch.alpha_ybar,
        n_events: batch.events.len(),
    }
}

/// Estimated cumulants `κ₁..κ₄` and central moments `μ₂..μ₄`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CumulantEstimates {
    pub kappa: [EstimatorResult; 4],
    pub mu: [EstimatorResult; 3],
}

impl CumulantEstimates {
    pub fn k(&self, order: usize) -> EstimatorResult {
        self.kappa[order - 1]
    }

    pub fn mu(&self, order: usize) -> EstimatorResult {
        self.mu[order - 2]
    }
}

fn statistics_vector(m: &MomentVector) -> [f64; 7] {
    let k = cumulants(m);
    let c = central_moments(m);
    [k.k1, k.k2, k.k3, k.k4, c.mu2, c.mu3, c.mu4]
}

impl FeatureReplicates {
    /// Cumulants of `op` on the estimated state, with bootstrap errors.
    pub fn cumulants(&self, op: &Mat4) -> CumulantEstimates {
        let mut w = [[0.0; N_FEATURES]; 4];
        let mut p = *op;
        for (n, wn) in w.iter_mut().enumerate() {
            if n > 0 {
                p = p * *op;
            }
            *wn = score_weights(&p, self.alpha_y, self.alpha_ybar);
        }
        let stats = |f: &Features| {
            statistics_vector(&MomentVector::new(
                dot(&w[0], f),
                dot(&w[1], f),
                dot(&w[2], f),
                dot(&w[3], f),
            ))
        };
        let point = stats(&self.mean);
        let reps: Vec<[f64; 7]> = self.replicates.iter().map(stats).collect();
        let result = |k: usize| EstimatorResult {
            value: point[k],
            stderr: std_dev(reps.iter().map(|r| r[k])),
            n_used: self.n_events,
        };
        CumulantEstimates {
            kappa: [result(0), result(1), result(2), result(3)],
            mu: [result(4), result(5), result(6)],
        }
    }
}

/// Plug-in cumulants of `B_CH` with bootstrap errors. `max_order ≥ 3`
/// needs at least `MIN_BATCH_HIGH_ORDER` events.
pub fn estimate_cumulants(
    batch: &EventBatch,
    settings: &MeasurementSettings,
    params: &ChParams,
    max_order: usize,
    bootstrap_n: usize,
    seed: u64,
) -> Result<CumulantEstimates> {
    if !(1..=4).contains(&max_order) {
        return Err(Error::OutOfRange {
            name: "max_order",
            value: max_order as f64,
        });
    }
    if max_order >= 3 {
        check_size(batch.events.len(), MIN_BATCH_HIGH_ORDER)?;
    }
    let reps = feature_replicates(batch, bootstrap_n, seed)?;
    let op = ch_operator(settings, params)?;
    Ok(reps.cumulants(&op.matrix))
}
