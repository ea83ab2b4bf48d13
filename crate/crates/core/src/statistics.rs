//! Statistical model of the trapped molecules: independent Poissonian
//! species of bound complexes over a set of tubes, and the closed-form
//! moments of the scattered light amplitude they produce.
//!
//! Each species contributes `composition[i]` molecules per complex to tube
//! `i`, with the number of complexes inside the beam Poisson-distributed.
//! Species are uncorrelated with each other, and all members of one complex
//! enter or leave the beam together.

use num_complex::Complex64;
use statrs::function::erf::erf;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatisticsError {
    #[error("species `{0}` has an all-zero composition")]
    EmptyComposition(String),
    #[error("species `{name}` has a negative or non-finite mean count {mean_count}")]
    BadMeanCount { name: String, mean_count: f64 },
    #[error("species `{name}` has {got} composition entries, expected {expected}")]
    CompositionLength {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("ensemble needs at least one tube")]
    NoTubes,
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("minimum weights are defined for two tubes, got {0}")]
    NotTwoTubes(usize),
    #[error("minimum weights undefined: the second tube has zero mean occupation")]
    UndefinedRatio,
    #[error("beam width must be positive and finite, got {0}")]
    BadWidth(f64),
    #[error("tube length {length} must be finite and at least the beam width {width}")]
    BeamExceedsTube { width: f64, length: f64 },
    #[error("line density must be non-negative and finite, got {0}")]
    BadDensity(f64),
}

/// One kind of complex: how many members it places in each tube, and the
/// mean number of such complexes inside the beam.
#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    name: String,
    composition: Vec<u32>,
    mean_count: f64,
}

impl Species {
    pub fn new(
        name: impl Into<String>,
        composition: Vec<u32>,
        mean_count: f64,
    ) -> Result<Self, StatisticsError> {
        let name = name.into();
        if composition.iter().all(|&c| c == 0) {
            return Err(StatisticsError::EmptyComposition(name));
        }
        if !mean_count.is_finite() || mean_count < 0.0 {
            return Err(StatisticsError::BadMeanCount { name, mean_count });
        }
        Ok(Self {
            name,
            composition,
            mean_count,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn composition(&self) -> &[u32] {
        &self.composition
    }

    pub fn mean_count(&self) -> f64 {
        self.mean_count
    }

    /// Same complex type with the mean count scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            name: self.name.clone(),
            composition: self.composition.clone(),
            mean_count: self.mean_count * factor,
        }
    }

    /// Weighted member total of one complex, `sum_i g_i * composition[i]`.
    pub fn weighted_members(&self, weights: &[Complex64]) -> Complex64 {
        self.composition
            .iter()
            .zip(weights)
            .map(|(&c, g)| g * f64::from(c))
            .sum()
    }
}

/// An independent collection of Poissonian species over a fixed set of tubes.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    tube_count: usize,
    species: Vec<Species>,
}

impl Ensemble {
    pub fn new(tube_count: usize, species: Vec<Species>) -> Result<Self, StatisticsError> {
        if tube_count == 0 {
            return Err(StatisticsError::NoTubes);
        }
        for s in &species {
            if s.composition.len() != tube_count {
                return Err(StatisticsError::CompositionLength {
                    name: s.name.clone(),
                    got: s.composition.len(),
                    expected: tube_count,
                });
            }
        }
        Ok(Self {
            tube_count,
            species,
        })
    }

    pub fn tube_count(&self) -> usize {
        self.tube_count
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    /// Mean molecule number per tube, `mu_i = sum_s composition[s][i] * mean_count[s]`.
    pub fn tube_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.tube_count];
        for s in &self.species {
            for (m, &c) in means.iter_mut().zip(&s.composition) {
                *m += f64::from(c) * s.mean_count;
            }
        }
        means
    }

    /// Covariance of the molecule numbers in tubes `i` and `j`:
    /// `sum_s composition[s][i] * composition[s][j] * mean_count[s]`.
    /// `i == j` gives the variance, which for Poissonian complexes carrying a
    /// single member equals the mean.
    ///
    /// Panics if an index is out of range.
    pub fn number_covariance(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.tube_count && j < self.tube_count, "tube index out of range");
        self.species
            .iter()
            .map(|s| f64::from(s.composition[i]) * f64::from(s.composition[j]) * s.mean_count)
            .sum()
    }

    /// Mean amplitude and photon rate for per-tube weights `g_i`, in units of
    /// the squared coupling prefactor.
    ///
    /// The photon rate splits into a coherent part `|sum_i g_i mu_i|^2` and a
    /// fluctuation part `sum_s mean_count[s] * |sum_i g_i c_si|^2`; at the
    /// diffraction minimum the coherent part cancels and only number
    /// fluctuations scatter.
    pub fn intensity(&self, weights: &[Complex64]) -> Result<IntensityReport, StatisticsError> {
        if weights.len() != self.tube_count {
            return Err(StatisticsError::WeightCount {
                expected: self.tube_count,
                got: weights.len(),
            });
        }
        let amplitude_mean: Complex64 = self
            .tube_means()
            .iter()
            .zip(weights)
            .map(|(&mu, g)| g * mu)
            .sum();
        let coherent_part = amplitude_mean.norm_sqr();
        let fluctuation_part: f64 = self
            .species
            .iter()
            .map(|s| s.mean_count * s.weighted_members(weights).norm_sqr())
            .sum();
        Ok(IntensityReport {
            amplitude_mean,
            coherent_part,
            fluctuation_part,
            photon_rate: coherent_part + fluctuation_part,
        })
    }

    /// Weights `(1, -mu_A/mu_B)` that cancel the mean amplitude of this
    /// two-tube ensemble, placing the detector at the diffraction minimum.
    pub fn minimum_weights(&self) -> Result<Vec<Complex64>, StatisticsError> {
        if self.tube_count != 2 {
            return Err(StatisticsError::NotTwoTubes(self.tube_count));
        }
        let means = self.tube_means();
        if means[1] <= 0.0 {
            return Err(StatisticsError::UndefinedRatio);
        }
        let alpha = means[0] / means[1];
        Ok(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-alpha, 0.0),
        ])
    }

    /// Population ratio `mu_A / mu_B` of a two-tube ensemble.
    pub fn population_ratio(&self) -> Result<f64, StatisticsError> {
        if self.tube_count != 2 {
            return Err(StatisticsError::NotTwoTubes(self.tube_count));
        }
        let means = self.tube_means();
        if means[1] <= 0.0 {
            return Err(StatisticsError::UndefinedRatio);
        }
        Ok(means[0] / means[1])
    }
}

/// Closed-form light moments for one ensemble and weight set, in units of
/// the squared coupling prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityReport {
    /// Mean scattered amplitude divided by the coupling prefactor.
    pub amplitude_mean: Complex64,
    /// `|amplitude_mean|^2`, the classical interference term.
    pub coherent_part: f64,
    /// Number-fluctuation term, `sum_s mean_count[s] * |weighted members|^2`.
    pub fluctuation_part: f64,
    /// Total photon rate, `coherent_part + fluctuation_part`.
    pub photon_rate: f64,
}

/// Transverse laser profile along the tube axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileShape {
    /// Constant 1 inside the beam window, 0 outside.
    TopHat,
    /// `exp(-4 x^2 / width^2)` around the beam centre: `width` is the full
    /// width at `1/e` of the peak.
    Gaussian,
}

/// Beam profile `R(x)` of width `width`, peak 1, centred on a tube of length
/// `tube_length`. Only the integrals of `R` and `R^2` over the tube enter
/// any result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamProfile {
    shape: ProfileShape,
    width: f64,
    tube_length: f64,
}

impl BeamProfile {
    pub fn new(shape: ProfileShape, width: f64, tube_length: f64) -> Result<Self, StatisticsError> {
        if !width.is_finite() || width <= 0.0 {
            return Err(StatisticsError::BadWidth(width));
        }
        if !tube_length.is_finite() || tube_length < width {
            return Err(StatisticsError::BeamExceedsTube {
                width,
                length: tube_length,
            });
        }
        Ok(Self {
            shape,
            width,
            tube_length,
        })
    }

    pub fn shape(&self) -> ProfileShape {
        self.shape
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn tube_length(&self) -> f64 {
        self.tube_length
    }

    /// Profile value at a coordinate in `[0, tube_length]`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let u = x - 0.5 * self.tube_length;
        match self.shape {
            ProfileShape::TopHat => {
                if u.abs() <= 0.5 * self.width {
                    1.0
                } else {
                    0.0
                }
            }
            ProfileShape::Gaussian => (-4.0 * u * u / (self.width * self.width)).exp(),
        }
    }

    /// Integral of `R(x)` over the tube.
    pub fn integral(&self) -> f64 {
        match self.shape {
            ProfileShape::TopHat => self.width,
            ProfileShape::Gaussian => {
                let w = self.width;
                0.5 * w * std::f64::consts::PI.sqrt() * erf(self.tube_length / w)
            }
        }
    }

    /// Integral of `R(x)^2` over the tube.
    pub fn squared_integral(&self) -> f64 {
        match self.shape {
            ProfileShape::TopHat => self.width,
            ProfileShape::Gaussian => {
                let w = self.width;
                0.5 * w * (std::f64::consts::PI / 2.0).sqrt()
                    * erf(std::f64::consts::SQRT_2 * self.tube_length / w)
            }
        }
    }
}

/// Mean and variance of the beam-weighted count of a species laid out as a
/// uniform Poisson point process of line density `density` along the tube.
///
/// By Campbell's formula the mean is `density * int R dx` and the variance is
/// `density * int R^2 dx`; a top-hat beam recovers an ordinary Poisson count
/// in the window.
pub fn effective_number_moments(
    density: f64,
    profile: &BeamProfile,
) -> Result<(f64, f64), StatisticsError> {
    if !density.is_finite() || density < 0.0 {
        return Err(StatisticsError::BadDensity(density));
    }
    Ok((
        density * profile.integral(),
        density * profile.squared_integral(),
    ))
}
