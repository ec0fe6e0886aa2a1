//! Seeded Monte Carlo estimation of block error probabilities.
//!
//! Trial `t` of a point with seed `s` draws its information word from stream 0
//! and its channel realization from stream 1 of a ChaCha8 generator keyed by
//! `mix(s, t)`, so results do not depend on scheduling or worker count.

mod csv;
mod reference;
mod sweep;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use csv::{write_csv, Record, CSV_HEADER};
pub use reference::{random_code_reference, random_code_failure_probability};
pub use sweep::{grid, run_sweep, run_sweep_with, DesignMode, SweepFamily, SweepPlan, SweepRow};

use crate::channels::{transmit, ChannelModel};
use crate::construction::{permuted_code, CodeSpec, LayerPermutation};
use crate::decoders::{decode, Decoder};
use crate::error::{Error, Result};
use crate::gf2::BitBlock;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a sequence of words.
pub fn mix(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6A09_E667_F3BC_C908, |h, &p| splitmix(h ^ splitmix(p)))
}

/// Generator for one stream of one trial.
pub fn trial_rng(seed: u64, trial: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(&[seed, trial]));
    rng.set_stream(stream);
    rng
}

pub(crate) fn random_word<R: Rng + ?Sized>(len: usize, rng: &mut R) -> BitBlock {
    let words = (0..len.div_ceil(64)).map(|_| rng.random::<u64>()).collect();
    BitBlock::from_words(len, words)
}

/// Block error estimate at one simulation point.
#[derive(Clone, Debug, PartialEq)]
pub struct SimEstimate {
    pub trials: u64,
    pub errors: u64,
    pub pe: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub wall_time: Duration,
    pub seed: u64,
}

impl SimEstimate {
    pub fn new(trials: u64, errors: u64, seed: u64, wall_time: Duration) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(errors, trials);
        Self {
            trials,
            errors,
            pe: errors as f64 / trials as f64,
            ci_lo,
            ci_hi,
            wall_time,
            seed,
        }
    }
}

/// 95% Wilson score interval for `k` successes in `m` trials.
pub fn wilson_interval(k: u64, m: u64) -> (f64, f64) {
    assert!(m > 0 && k <= m);
    let (k, m) = (k as f64, m as f64);
    let p = k / m;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / m;
    let center = (p + z2 / (2.0 * m)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / m + z2 / (4.0 * m * m)).sqrt();
    let lo = (center - half).clamp(0.0, 1.0).min(p);
    let hi = (center + half).clamp(0.0, 1.0).max(p);
    (lo, hi)
}

fn check_pairing(channel: &ChannelModel, decoder: &Decoder, trials: u64) -> Result<()> {
    decoder.validate()?;
    if !decoder.supports(channel.family()) {
        return Err(Error::Unsupported(format!(
            "{} decoder over {channel}",
            decoder.name()
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    Ok(())
}

/// Whether trial `trial` of the point ends in a block error.
pub fn trial_error(
    spec: &CodeSpec,
    channel: &ChannelModel,
    decoder: &Decoder,
    seed: u64,
    trial: u64,
) -> Result<bool> {
    let info = random_word(spec.dimension(), &mut trial_rng(seed, trial, 0));
    let x = spec.encode(&info)?;
    let obs = transmit(channel, &x, &mut trial_rng(seed, trial, 1));
    Ok(!decode(spec, &obs, decoder)?.recovers(&info))
}

fn count_errors(
    spec: &CodeSpec,
    channel: &ChannelModel,
    decoder: &Decoder,
    trials: u64,
    seed: u64,
) -> Result<u64> {
    (0..trials)
        .into_par_iter()
        .map(|t| trial_error(spec, channel, decoder, seed, t).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Runs `trials` independent trials on the current rayon pool.
pub fn run_point(
    spec: &CodeSpec,
    channel: &ChannelModel,
    decoder: &Decoder,
    trials: u64,
    seed: u64,
) -> Result<SimEstimate> {
    check_pairing(channel, decoder, trials)?;
    let start = Instant::now();
    let errors = count_errors(spec, channel, decoder, trials, seed)?;
    Ok(SimEstimate::new(trials, errors, seed, start.elapsed()))
}

/// Runs `f` on a pool with `workers` threads, or the global pool for `None`.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidArgument("workers must be at least 1".into())),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// MAP on a layer-permuted code against SC on the original, on shared realizations.
#[derive(Clone, Debug, PartialEq)]
pub struct Prop2Report {
    pub permuted: CodeSpec,
    pub map: SimEstimate,
    pub sc: SimEstimate,
    /// `map.pe <= sc.pe`.
    pub holds: bool,
}

pub fn proposition2_check(
    spec: &CodeSpec,
    pi: &LayerPermutation,
    epsilon: f64,
    trials: u64,
    seed: u64,
) -> Result<Prop2Report> {
    let channel = ChannelModel::bec(epsilon)?;
    if let Some(c) = spec.channel() {
        if c.family() != channel.family() {
            return Err(Error::Unsupported(format!("design channel {c} is not an erasure channel")));
        }
    }
    let permuted = permuted_code(spec, pi)?;
    let map = run_point(&permuted, &channel, &Decoder::Map, trials, seed)?;
    let sc = run_point(spec, &channel, &Decoder::Sc, trials, seed)?;
    Ok(Prop2Report {
        holds: map.pe <= sc.pe,
        permuted,
        map,
        sc,
    })
}
