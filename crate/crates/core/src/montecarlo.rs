//! Independent stochastic oracle for the closed-form moments: draws species
//! counts (optionally positions under a beam profile), forms the weighted
//! amplitude per sample, and reports means with standard errors.
//!
//! The sample budget is split into fixed-size chunks, each with a seed
//! derived from `(seed, stage_index, chunk_index)`, and chunk partials are
//! merged in chunk order. Estimates are therefore bit-identical whether the
//! chunks run sequentially or on a rayon pool, for any thread count.

use crate::sampling::{chunk_seed, stage_seed, uniform_f64, PoissonSampler};
use crate::statistics::{BeamProfile, Ensemble};
use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

/// Samples per independent chunk. Fixed: it is part of the reproducibility
/// contract along with the seed-derivation hash.
pub const CHUNK_SIZE: u64 = 4096;

/// Species means beyond this are refused; the count fluctuations they imply
/// are far outside f64 resolution of the accumulated moments.
pub const MAX_MEAN: f64 = 1e12;

#[derive(Debug, Error, PartialEq)]
pub enum MonteCarloError {
    #[error("sample budget must be at least 1")]
    ZeroSamples,
    #[error("position-resolved sampling needs a beam profile")]
    MissingProfile,
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("species `{name}` mean {mean} exceeds the sampler guard of 1e12")]
    MeanTooLarge { name: String, mean: f64 },
}

/// Sampling budget and mode.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    /// Number of independent amplitude draws (at least 1).
    pub samples: u64,
    /// Master seed; all chunk and stage seeds derive from it.
    pub seed: u64,
    /// Draw longitudinal complex positions and weight members by the beam
    /// profile instead of counting whole complexes in the beam.
    pub position_resolved: bool,
    /// Beam profile, required when `position_resolved` is set.
    pub profile: Option<BeamProfile>,
}

impl McConfig {
    /// Count-only sampling: complexes are wholly in or out of the beam.
    pub fn counts(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            position_resolved: false,
            profile: None,
        }
    }

    /// Position-resolved sampling under a beam profile.
    pub fn with_positions(samples: u64, seed: u64, profile: BeamProfile) -> Self {
        Self {
            samples,
            seed,
            position_resolved: true,
            profile: Some(profile),
        }
    }
}

/// Sample estimates of the photon rate and mean amplitude.
///
/// `photon_rate_stderr` is the standard error of the sample mean of the
/// squared amplitude modulus (no Gaussianity assumed for the amplitude);
/// `amplitude_stderr` combines the real and imaginary component variances,
/// `sqrt((var_re + var_im) / samples)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub photon_rate_mean: f64,
    pub photon_rate_stderr: f64,
    pub amplitude_mean: Complex64,
    pub amplitude_stderr: f64,
    pub samples_used: u64,
}

/// Estimate the photon rate and mean amplitude of one ensemble.
///
/// Equivalent to the first element of [`estimate_scan`] over a one-stage
/// list, bit for bit.
pub fn estimate(
    ensemble: &Ensemble,
    weights: &[Complex64],
    config: &McConfig,
) -> Result<McEstimate, MonteCarloError> {
    estimate_at_stage(ensemble, weights, config, 0, false)
}

/// [`estimate`] forced onto the sequential chunk loop regardless of the
/// `parallel` feature. Produces bit-identical results; exists for the bench
/// suite and for pinning the parallel merge.
pub fn estimate_sequential(
    ensemble: &Ensemble,
    weights: &[Complex64],
    config: &McConfig,
) -> Result<McEstimate, MonteCarloError> {
    estimate_at_stage(ensemble, weights, config, 0, true)
}

/// Elementwise [`estimate`] over scan stages, each with its own derived
/// stage seed.
pub fn estimate_scan(
    stages: &[Ensemble],
    weights: &[Complex64],
    config: &McConfig,
) -> Result<Vec<McEstimate>, MonteCarloError> {
    stages
        .iter()
        .enumerate()
        .map(|(i, e)| estimate_at_stage(e, weights, config, i as u64, false))
        .collect()
}

fn estimate_at_stage(
    ensemble: &Ensemble,
    weights: &[Complex64],
    config: &McConfig,
    stage_index: u64,
    force_sequential: bool,
) -> Result<McEstimate, MonteCarloError> {
    if config.samples == 0 {
        return Err(MonteCarloError::ZeroSamples);
    }
    if weights.len() != ensemble.tube_count() {
        return Err(MonteCarloError::WeightCount {
            expected: ensemble.tube_count(),
            got: weights.len(),
        });
    }
    let ctx = SampleCtx::prepare(ensemble, weights, config)?;

    let seed = stage_seed(config.seed, stage_index);
    let sums = collect_chunks(&ctx, seed, config.samples, force_sequential);
    let total = sums
        .into_iter()
        .fold(ChunkSums::default(), ChunkSums::merge);
    Ok(finalize(total, config.samples))
}

struct SpeciesCtx {
    members: Vec<f64>,
    sampler: PoissonSampler,
}

struct SampleCtx<'a> {
    species: Vec<SpeciesCtx>,
    weights: &'a [Complex64],
    tube_count: usize,
    profile: Option<BeamProfile>,
}

impl<'a> SampleCtx<'a> {
    fn prepare(
        ensemble: &Ensemble,
        weights: &'a [Complex64],
        config: &McConfig,
    ) -> Result<Self, MonteCarloError> {
        let profile = if config.position_resolved {
            Some(config.profile.ok_or(MonteCarloError::MissingProfile)?)
        } else {
            None
        };
        let species = ensemble
            .species()
            .iter()
            .map(|s| {
                // In position-resolved mode the point process covers the
                // whole tube at a density that restores the beam mean.
                let count_mean = match &profile {
                    None => s.mean_count(),
                    Some(p) => s.mean_count() * p.tube_length() / p.integral(),
                };
                if count_mean > MAX_MEAN {
                    return Err(MonteCarloError::MeanTooLarge {
                        name: s.name().to_owned(),
                        mean: count_mean,
                    });
                }
                Ok(SpeciesCtx {
                    members: s.composition().iter().map(|&c| f64::from(c)).collect(),
                    sampler: PoissonSampler::new(count_mean),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            species,
            weights,
            tube_count: ensemble.tube_count(),
            profile,
        })
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct ChunkSums {
    sum_amplitude: Complex64,
    sum_re_sq: f64,
    sum_im_sq: f64,
    sum_rate: f64,
    sum_rate_sq: f64,
}

impl ChunkSums {
    fn merge(self, other: Self) -> Self {
        Self {
            sum_amplitude: self.sum_amplitude + other.sum_amplitude,
            sum_re_sq: self.sum_re_sq + other.sum_re_sq,
            sum_im_sq: self.sum_im_sq + other.sum_im_sq,
            sum_rate: self.sum_rate + other.sum_rate,
            sum_rate_sq: self.sum_rate_sq + other.sum_rate_sq,
        }
    }
}

fn collect_chunks(
    ctx: &SampleCtx,
    stage_seed: u64,
    samples: u64,
    force_sequential: bool,
) -> Vec<ChunkSums> {
    let n_chunks = samples.div_ceil(CHUNK_SIZE);
    let chunk_len = move |c: u64| {
        if c + 1 == n_chunks {
            samples - c * CHUNK_SIZE
        } else {
            CHUNK_SIZE
        }
    };
    #[cfg(feature = "parallel")]
    if !force_sequential {
        return (0..n_chunks)
            .into_par_iter()
            .map(|c| run_chunk(ctx, chunk_seed(stage_seed, c), chunk_len(c)))
            .collect();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = force_sequential;
    (0..n_chunks)
        .map(|c| run_chunk(ctx, chunk_seed(stage_seed, c), chunk_len(c)))
        .collect()
}

fn run_chunk(ctx: &SampleCtx, seed: u64, count: u64) -> ChunkSums {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut occupancy = vec![0.0f64; ctx.tube_count];
    let mut sums = ChunkSums::default();
    for _ in 0..count {
        occupancy.fill(0.0);
        for sp in &ctx.species {
            let drawn = sp.sampler.sample(&mut rng);
            match &ctx.profile {
                None => {
                    let m = drawn as f64;
                    for (n, c) in occupancy.iter_mut().zip(&sp.members) {
                        *n += c * m;
                    }
                }
                Some(profile) => {
                    // Every member of a complex shares its longitudinal
                    // position, so one weight applies to the whole complex.
                    for _ in 0..drawn {
                        let x = profile.tube_length() * uniform_f64(&mut rng);
                        let r = profile.evaluate(x);
                        for (n, c) in occupancy.iter_mut().zip(&sp.members) {
                            *n += c * r;
                        }
                    }
                }
            }
        }
        let amplitude: Complex64 = occupancy
            .iter()
            .zip(ctx.weights)
            .map(|(&n, g)| g * n)
            .sum();
        let rate = amplitude.norm_sqr();
        sums.sum_amplitude += amplitude;
        sums.sum_re_sq += amplitude.re * amplitude.re;
        sums.sum_im_sq += amplitude.im * amplitude.im;
        sums.sum_rate += rate;
        sums.sum_rate_sq += rate * rate;
    }
    sums
}

fn finalize(total: ChunkSums, samples: u64) -> McEstimate {
    let n = samples as f64;
    let photon_rate_mean = total.sum_rate / n;
    let amplitude_mean = total.sum_amplitude / n;
    let (photon_rate_stderr, amplitude_stderr) = if samples > 1 {
        let denom = n - 1.0;
        let var_rate =
            ((total.sum_rate_sq - n * photon_rate_mean * photon_rate_mean) / denom).max(0.0);
        let var_re =
            ((total.sum_re_sq - n * amplitude_mean.re * amplitude_mean.re) / denom).max(0.0);
        let var_im =
            ((total.sum_im_sq - n * amplitude_mean.im * amplitude_mean.im) / denom).max(0.0);
        ((var_rate / n).sqrt(), ((var_re + var_im) / n).sqrt())
    } else {
        (0.0, 0.0)
    };
    McEstimate {
        photon_rate_mean,
        photon_rate_stderr,
        amplitude_mean,
        amplitude_stderr,
        samples_used: samples,
    }
}
