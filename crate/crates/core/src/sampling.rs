//! Deterministic random-variate plumbing for the Monte Carlo estimator:
//! seed derivation, uniform doubles, and fixed-method Poisson sampling.
//!
//! Every choice here is part of the reproducibility contract. Changing the
//! seed hash, the uniform mapping, the Poisson method or its switch-over
//! point changes every estimate for a given seed.

use rand_chacha::rand_core::RngCore;
use statrs::function::gamma::ln_gamma;

/// Above this mean the Poisson sampler switches from inversion to rejection.
pub const POISSON_INVERSION_MAX: f64 = 10.0;

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on `u64`.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one stage of a scan: `splitmix64(seed ^ (stage_index + 1) * K1)`.
///
/// Stage 0 is what a standalone estimate uses, so a one-stage scan and a
/// direct estimate agree bit for bit.
pub fn stage_seed(seed: u64, stage_index: u64) -> u64 {
    const K1: u64 = 0xA076_1D64_78BD_642F;
    splitmix64(seed ^ stage_index.wrapping_add(1).wrapping_mul(K1))
}

/// Seed for one sampling chunk: `splitmix64(stage_seed ^ (chunk_index + 1) * K2)`.
///
/// Chunks are fixed-size slices of the sample budget, so the derived streams
/// do not depend on how chunks are scheduled across threads.
pub fn chunk_seed(stage_seed: u64, chunk_index: u64) -> u64 {
    const K2: u64 = 0xE703_7ED1_A0B4_28DB;
    splitmix64(stage_seed ^ chunk_index.wrapping_add(1).wrapping_mul(K2))
}

/// Uniform double in `[0, 1)` from the top 53 bits of one `u64` draw.
pub fn uniform_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Poisson sampler with a fixed per-mean method: sequential-search inversion
/// below [`POISSON_INVERSION_MAX`], otherwise the classic rejection scheme
/// with a Cauchy comparison function ("poidev", Numerical Recipes ch. 7.3).
#[derive(Debug, Clone, Copy)]
pub struct PoissonSampler {
    method: Method,
}

#[derive(Debug, Clone, Copy)]
enum Method {
    Inversion {
        lambda: f64,
        exp_neg_lambda: f64,
    },
    Rejection {
        lambda: f64,
        sqrt_two_lambda: f64,
        log_lambda: f64,
        scale: f64,
    },
}

impl PoissonSampler {
    /// `mean` must be finite and non-negative.
    pub fn new(mean: f64) -> Self {
        assert!(mean.is_finite() && mean >= 0.0, "invalid Poisson mean {mean}");
        let method = if mean < POISSON_INVERSION_MAX {
            Method::Inversion {
                lambda: mean,
                exp_neg_lambda: (-mean).exp(),
            }
        } else {
            Method::Rejection {
                lambda: mean,
                sqrt_two_lambda: (2.0 * mean).sqrt(),
                log_lambda: mean.ln(),
                scale: mean * mean.ln() - ln_gamma(1.0 + mean),
            }
        };
        Self { method }
    }

    pub fn mean(&self) -> f64 {
        match self.method {
            Method::Inversion { lambda, .. } | Method::Rejection { lambda, .. } => lambda,
        }
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> u64 {
        match self.method {
            Method::Inversion {
                lambda,
                exp_neg_lambda,
            } => {
                // Walk the cumulative distribution until it passes u. The
                // `p > 0` guard terminates the walk once the term underflows.
                let u = uniform_f64(rng);
                let mut k = 0u64;
                let mut p = exp_neg_lambda;
                let mut acc = p;
                while u > acc && p > 0.0 {
                    k += 1;
                    p *= lambda / k as f64;
                    acc += p;
                }
                k
            }
            Method::Rejection {
                lambda,
                sqrt_two_lambda,
                log_lambda,
                scale,
            } => loop {
                // Cauchy deviate centred on the mean; reject negatives.
                let y = (std::f64::consts::PI * uniform_f64(rng)).tan();
                let shifted = sqrt_two_lambda * y + lambda;
                if shifted < 0.0 {
                    continue;
                }
                let k = shifted.floor();
                // Acceptance ratio of the Poisson pmf to the Lorentzian
                // envelope; 0.9 keeps it below 1.
                let threshold = 0.9
                    * (1.0 + y * y)
                    * (k * log_lambda - ln_gamma(1.0 + k) - scale).exp();
                if uniform_f64(rng) <= threshold {
                    return k as u64;
                }
            },
        }
    }
}
