//! Rayon versions of the core drivers. Shards and bootstrap replicates
//! own their RNG streams, so the results match the sequential code bit
//! for bit.

use hyqc_core::montecarlo::{
    assemble_batch, check_replicate_inputs, feature_replicates_from_parts, replicate_mean,
    sample_shard, shard_layout, EventBatch, FeatureReplicates,
};
use hyqc_core::scan::{point_seed, McOptions, McRow, Quantity, ScanRow, ScanSpec, Scenario};
use hyqc_core::states::TwoQubitDecomposition;
use hyqc_core::{Error, Result};
use rayon::prelude::*;

pub fn scan(sc: &Scenario, spec: &ScanSpec) -> Result<Vec<ScanRow>> {
    sc.check(spec)?;
    spec.points().into_par_iter().map(|x| sc.row(x)).collect()
}

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
    let layout: Vec<_> = shard_layout(count).collect();
    let shards: Vec<_> = layout
        .into_par_iter()
        .map(|(s, n)| sample_shard(truth, alpha_y, alpha_ybar, seed, s, n))
        .collect();
    assemble_batch(truth, alpha_y, alpha_ybar, seed, count, shards)
}

pub fn feature_replicates(
    batch: &EventBatch,
    resamples: usize,
    seed: u64,
) -> Result<FeatureReplicates> {
    check_replicate_inputs(batch, resamples)?;
    let reps = (0..resamples)
        .into_par_iter()
        .map(|r| replicate_mean(&batch.events, seed, r))
        .collect();
    Ok(feature_replicates_from_parts(batch, reps))
}

fn sample(
    sc: &Scenario,
    x: f64,
    seed: u64,
    opts: &McOptions,
) -> Result<(EventBatch, Option<FeatureReplicates>)> {
    let batch = sample_events(
        &sc.truth(x)?,
        sc.channel.alpha_y,
        sc.channel.alpha_ybar(),
        opts.n_events,
        seed,
    )?;
    let reps = match sc.quantity {
        Quantity::ChMean => None,
        _ => Some(feature_replicates(&batch, opts.resamples, seed)?),
    };
    Ok((batch, reps))
}

/// Same rows as `hyqc_core::scan::mc_scan`.
pub fn mc_scan(sc: &Scenario, spec: &ScanSpec, opts: &McOptions) -> Result<Vec<McRow>> {
    sc.check(spec)?;
    let pts = spec.points();
    if sc.shares_batch() {
        let (batch, reps) = sample(sc, pts[0], opts.seed, opts)?;
        pts.into_par_iter()
            .map(|x| sc.mc_point(x, &batch, reps.as_ref()))
            .collect()
    } else {
        pts.into_par_iter()
            .enumerate()
            .map(|(i, x)| {
                let (batch, reps) = sample(sc, x, point_seed(opts.seed, i), opts)?;
                sc.mc_point(x, &batch, reps.as_ref())
            })
            .collect()
    }
}

/// The batch `mc_scan` uses at grid point `i`.
pub fn batch_at(sc: &Scenario, spec: &ScanSpec, opts: &McOptions, i: usize) -> Result<EventBatch> {
    sc.check(spec)?;
    let seed = if sc.shares_batch() {
        opts.seed
    } else {
        point_seed(opts.seed, i)
    };
    let x = if sc.shares_batch() {
        spec.point(0)
    } else {
        spec.point(i)
    };
    sample_events(
        &sc.truth(x)?,
        sc.channel.alpha_y,
        sc.channel.alpha_ybar(),
        opts.n_events,
        seed,
    )
}
