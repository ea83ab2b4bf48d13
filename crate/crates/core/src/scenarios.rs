//! Dissociation cascades: ordered two-tube ensemble stages with conserved
//! per-tube means, and the interpolating bound-fraction scan that traces the
//! plateau curve between them.
//!
//! The scan axis is schematic. Which physical knob moves a real system
//! through the stages (dipole orientation, interaction strength) is outside
//! this crate; stages are mixed linearly in the species fractions, which is
//! the minimal model consistent with independent species.

use crate::statistics::{Ensemble, Species, StatisticsError};
use num_complex::Complex64;
use thiserror::Error;

/// Tolerance for per-tube mean conservation across stages, and for the
/// first-stage darkness check.
const CONSERVATION_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("cascade needs at least one stage")]
    NoStages,
    #[error("cascades are defined over two tubes, got {0}")]
    NotTwoTubes(usize),
    #[error("molecule scale must be positive and finite, got {0}")]
    BadScale(f64),
    #[error(
        "stage `{stage}` changes the mean of tube {tube} from {expected} to {got}; \
         dissociation conserves per-tube means"
    )]
    MeanNotConserved {
        stage: String,
        tube: usize,
        expected: f64,
        got: f64,
    },
    #[error("first stage `{0}` must hold a single species")]
    FirstStageNotSingle(String),
    #[error("first stage `{0}` scatters at the diffraction minimum; it must be a bound complex")]
    FirstStageNotDark(String),
    #[error("scan needs at least 2 points per stage, got {0}")]
    TooFewPoints(usize),
    #[error(transparent)]
    Statistics(#[from] StatisticsError),
}

/// The built-in cascades. Labels follow the `members-in-A`-`members-in-B`
/// notation for the initial bound complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CascadeKind {
    /// `1-1` pair dissociating into two free molecules.
    Dimer11,
    /// `1-2` complex: bound, then dimer + free, then all free.
    Trimer12,
    /// `1-3` complex: bound, trimer + free, dimer + free, all free.
    Tetramer13,
    /// `2-2` complex: bound, two dimers, all free.
    Tetramer22,
}

impl CascadeKind {
    pub const ALL: [CascadeKind; 4] = [
        CascadeKind::Dimer11,
        CascadeKind::Trimer12,
        CascadeKind::Tetramer13,
        CascadeKind::Tetramer22,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CascadeKind::Dimer11 => "dimer11",
            CascadeKind::Trimer12 => "trimer12",
            CascadeKind::Tetramer13 => "tetramer13",
            CascadeKind::Tetramer22 => "tetramer22",
        }
    }
}

/// An ordered list of dissociation stages over two tubes.
///
/// Every stage carries the same per-tube means as the first (dissociation
/// rearranges correlations, not populations), and the first stage is a
/// single bound species, dark at the diffraction minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade {
    name: String,
    tube_count: usize,
    stages: Vec<(String, Ensemble)>,
    molecule_scale: f64,
}

impl Cascade {
    /// Validate and assemble a cascade from explicit stages.
    pub fn new(
        name: impl Into<String>,
        stages: Vec<(String, Ensemble)>,
        molecule_scale: f64,
    ) -> Result<Self, ScenarioError> {
        if stages.is_empty() {
            return Err(ScenarioError::NoStages);
        }
        if !molecule_scale.is_finite() || molecule_scale <= 0.0 {
            return Err(ScenarioError::BadScale(molecule_scale));
        }
        let tube_count = stages[0].1.tube_count();
        if tube_count != 2 {
            return Err(ScenarioError::NotTwoTubes(tube_count));
        }
        let reference = stages[0].1.tube_means();
        for (label, ensemble) in &stages {
            if ensemble.tube_count() != tube_count {
                return Err(ScenarioError::NotTwoTubes(ensemble.tube_count()));
            }
            let means = ensemble.tube_means();
            for (tube, (&expected, &got)) in reference.iter().zip(&means).enumerate() {
                if (expected - got).abs() > CONSERVATION_TOL * expected.abs().max(1.0) {
                    return Err(ScenarioError::MeanNotConserved {
                        stage: label.clone(),
                        tube,
                        expected,
                        got,
                    });
                }
            }
        }
        let (first_label, first) = &stages[0];
        if first.species().len() != 1 {
            return Err(ScenarioError::FirstStageNotSingle(first_label.clone()));
        }
        let weights = first.minimum_weights()?;
        let report = first.intensity(&weights)?;
        if report.fluctuation_part.abs() > CONSERVATION_TOL {
            return Err(ScenarioError::FirstStageNotDark(first_label.clone()));
        }
        Ok(Self {
            name: name.into(),
            tube_count,
            stages,
            molecule_scale,
        })
    }

    /// Build one of the four standard cascades with `n` complexes in the beam.
    pub fn build(kind: CascadeKind, n: f64) -> Result<Self, ScenarioError> {
        if !n.is_finite() || n <= 0.0 {
            return Err(ScenarioError::BadScale(n));
        }
        let species = |name: &str, comp: Vec<u32>, mean: f64| {
            Species::new(name, comp, mean).expect("built-in species are valid")
        };
        let ensemble = |list: Vec<Species>| Ensemble::new(2, list).expect("built-in stages are valid");
        let stages: Vec<(String, Ensemble)> = match kind {
            CascadeKind::Dimer11 => vec![
                ("bound 1-1".into(), ensemble(vec![species("dimer", vec![1, 1], n)])),
                (
                    "free".into(),
                    ensemble(vec![
                        species("free_a", vec![1, 0], n),
                        species("free_b", vec![0, 1], n),
                    ]),
                ),
            ],
            CascadeKind::Trimer12 => vec![
                ("bound 1-2".into(), ensemble(vec![species("trimer", vec![1, 2], n)])),
                (
                    "dimer + free".into(),
                    ensemble(vec![
                        species("dimer", vec![1, 1], n),
                        species("free_b", vec![0, 1], n),
                    ]),
                ),
                (
                    "free".into(),
                    ensemble(vec![
                        species("free_a", vec![1, 0], n),
                        species("free_b", vec![0, 1], 2.0 * n),
                    ]),
                ),
            ],
            CascadeKind::Tetramer13 => vec![
                ("bound 1-3".into(), ensemble(vec![species("tetramer", vec![1, 3], n)])),
                (
                    "trimer + free".into(),
                    ensemble(vec![
                        species("trimer", vec![1, 2], n),
                        species("free_b", vec![0, 1], n),
                    ]),
                ),
                (
                    "dimer + free".into(),
                    ensemble(vec![
                        species("dimer", vec![1, 1], n),
                        species("free_b", vec![0, 1], 2.0 * n),
                    ]),
                ),
                (
                    "free".into(),
                    ensemble(vec![
                        species("free_a", vec![1, 0], n),
                        species("free_b", vec![0, 1], 3.0 * n),
                    ]),
                ),
            ],
            CascadeKind::Tetramer22 => vec![
                ("bound 2-2".into(), ensemble(vec![species("tetramer", vec![2, 2], n)])),
                (
                    "two dimers".into(),
                    ensemble(vec![species("dimer", vec![1, 1], 2.0 * n)]),
                ),
                (
                    "free".into(),
                    ensemble(vec![
                        species("free_a", vec![1, 0], 2.0 * n),
                        species("free_b", vec![0, 1], 2.0 * n),
                    ]),
                ),
            ],
        };
        Self::new(kind.name(), stages, n)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tube_count(&self) -> usize {
        self.tube_count
    }

    pub fn stages(&self) -> &[(String, Ensemble)] {
        &self.stages
    }

    pub fn molecule_scale(&self) -> f64 {
        self.molecule_scale
    }

    /// The same stages in reverse: an association sequence, along which the
    /// scattered intensity is stepwise suppressed.
    pub fn reversed(&self) -> Cascade {
        let mut stages = self.stages.clone();
        stages.reverse();
        Cascade {
            name: format!("{} (association)", self.name),
            tube_count: self.tube_count,
            stages,
            molecule_scale: self.molecule_scale,
        }
    }

    /// Diffraction-minimum weights frozen from the first stage's means.
    /// Means are conserved, so these cancel the amplitude at every stage.
    pub fn minimum_weights(&self) -> Result<Vec<Complex64>, ScenarioError> {
        Ok(self.stages[0].1.minimum_weights()?)
    }

    /// Closed-form plateau photon rate of each stage at the minimum weights.
    pub fn stage_rates(&self) -> Result<Vec<f64>, ScenarioError> {
        let weights = self.minimum_weights()?;
        self.stages
            .iter()
            .map(|(_, e)| Ok(e.intensity(&weights)?.photon_rate))
            .collect()
    }

    /// Ensemble interpolating between stage `k` and stage `k + 1`: stage-`k`
    /// species scaled by `bound_fraction`, next-stage species by the rest.
    ///
    /// Panics if `stage_index + 1` is out of range.
    pub fn mixture(&self, stage_index: usize, bound_fraction: f64) -> Ensemble {
        let mut species: Vec<Species> = self.stages[stage_index]
            .1
            .species()
            .iter()
            .map(|s| s.scaled(bound_fraction))
            .collect();
        species.extend(
            self.stages[stage_index + 1]
                .1
                .species()
                .iter()
                .map(|s| s.scaled(1.0 - bound_fraction)),
        );
        Ensemble::new(self.tube_count, species).expect("mixture stays valid")
    }

    /// Scan the cascade with `points_per_stage` points per segment (shared
    /// endpoints emitted once), pairing each point with its ensemble.
    ///
    /// The scan parameter runs from 0 to `stages - 1`; integer values land
    /// exactly on the stages. Weights are held fixed from the first stage.
    pub fn scan_with_ensembles(
        &self,
        points_per_stage: usize,
    ) -> Result<Vec<(ScanPoint, Ensemble)>, ScenarioError> {
        if points_per_stage < 2 {
            return Err(ScenarioError::TooFewPoints(points_per_stage));
        }
        let weights = self.minimum_weights()?;
        let mut points = Vec::new();
        let mut push = |parameter: f64, stage_index: usize, bound_fraction: f64| {
            let ensemble = if bound_fraction == 1.0 {
                self.stages[stage_index].1.clone()
            } else {
                self.mixture(stage_index, bound_fraction)
            };
            let report = ensemble.intensity(&weights)?;
            points.push((
                ScanPoint {
                    parameter,
                    stage_index,
                    bound_fraction,
                    photon_rate: report.photon_rate,
                    amplitude_mean: report.amplitude_mean,
                },
                ensemble,
            ));
            Ok::<(), ScenarioError>(())
        };
        let segments = self.stages.len() - 1;
        for k in 0..segments {
            for j in 0..points_per_stage - 1 {
                let s = j as f64 / (points_per_stage - 1) as f64;
                push(k as f64 + s, k, 1.0 - s)?;
            }
        }
        push(segments as f64, self.stages.len() - 1, 1.0)?;
        Ok(points)
    }

    /// [`Self::scan_with_ensembles`] without the ensembles.
    pub fn scan(&self, points_per_stage: usize) -> Result<Vec<ScanPoint>, ScenarioError> {
        Ok(self
            .scan_with_ensembles(points_per_stage)?
            .into_iter()
            .map(|(p, _)| p)
            .collect())
    }
}

/// One point of a plateau scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    /// Schematic scan coordinate in `[0, stages - 1]`.
    pub parameter: f64,
    /// Stage whose species are still bound at this point.
    pub stage_index: usize,
    /// Fraction of that stage remaining; 1 exactly on a stage.
    pub bound_fraction: f64,
    /// Closed-form photon rate in units of the squared coupling prefactor.
    pub photon_rate: f64,
    /// Closed-form mean amplitude (zero at the minimum for every point).
    pub amplitude_mean: Complex64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimer_cascade_plateaus() {
        let n = 4.0;
        let c = Cascade::build(CascadeKind::Dimer11, n).unwrap();
        assert_eq!(c.stage_rates().unwrap(), vec![0.0, 2.0 * n]);
    }

    #[test]
    fn trimer_cascade_plateaus() {
        let n = 4.0;
        let c = Cascade::build(CascadeKind::Trimer12, n).unwrap();
        let rates = c.stage_rates().unwrap();
        assert_eq!(rates.len(), 3);
        assert_eq!(rates[0], 0.0);
        assert!((rates[1] - 0.5 * n).abs() < 1e-12);
        assert!((rates[2] - 1.5 * n).abs() < 1e-12);
    }

    #[test]
    fn tetramer13_cascade_plateaus() {
        let n = 9.0;
        let c = Cascade::build(CascadeKind::Tetramer13, n).unwrap();
        let rates = c.stage_rates().unwrap();
        let expected = [0.0, 2.0 * n / 9.0, 6.0 * n / 9.0, 12.0 * n / 9.0];
        for (r, e) in rates.iter().zip(expected) {
            assert!((r - e).abs() < 1e-12, "{r} vs {e}");
        }
    }

    #[test]
    fn tetramer22_first_step_is_invisible() {
        let n = 4.0;
        let c = Cascade::build(CascadeKind::Tetramer22, n).unwrap();
        let rates = c.stage_rates().unwrap();
        assert_eq!(rates[0], 0.0);
        assert_eq!(rates[1], 0.0);
        assert!((rates[2] - 4.0 * n).abs() < 1e-12);
    }

    #[test]
    fn scan_with_two_points_is_the_plateau_table() {
        let n = 9.0;
        let c = Cascade::build(CascadeKind::Tetramer13, n).unwrap();
        let points = c.scan(2).unwrap();
        let rates: Vec<f64> = points.iter().map(|p| p.photon_rate).collect();
        assert_eq!(rates, c.stage_rates().unwrap());
        for (i, p) in points.iter().enumerate() {
            assert_eq!(p.parameter, i as f64);
            assert_eq!(p.bound_fraction, 1.0);
        }
    }

    // Closed-form oracle: the half-dissociated dimer stage is the explicit
    // three-species mixture, which scatters exactly n.
    #[test]
    fn dimer_scan_midpoint_matches_explicit_mixture() {
        let n = 4.0;
        let c = Cascade::build(CascadeKind::Dimer11, n).unwrap();
        let points = c.scan(3).unwrap();
        let mid = &points[1];
        assert_eq!(mid.bound_fraction, 0.5);

        let mixture = Ensemble::new(
            2,
            vec![
                Species::new("dimer", vec![1, 1], 0.5 * n).unwrap(),
                Species::new("free_a", vec![1, 0], 0.5 * n).unwrap(),
                Species::new("free_b", vec![0, 1], 0.5 * n).unwrap(),
            ],
        )
        .unwrap();
        let oracle = mixture
            .intensity(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)])
            .unwrap()
            .photon_rate;
        assert!((mid.photon_rate - oracle).abs() < 1e-12);
        assert!((mid.photon_rate - n).abs() < 1e-12);
    }

    #[test]
    fn scans_are_monotone_and_silent() {
        for kind in CascadeKind::ALL {
            let c = Cascade::build(kind, 4.0).unwrap();
            let points = c.scan(7).unwrap();
            let means0 = c.stages()[0].1.tube_means();
            for pair in points.windows(2) {
                assert!(
                    pair[1].photon_rate >= pair[0].photon_rate - 1e-12,
                    "{} not monotone",
                    c.name()
                );
            }
            for (p, e) in c.scan_with_ensembles(7).unwrap() {
                assert!(p.amplitude_mean.norm() < 1e-12);
                let means = e.tube_means();
                for (a, b) in means0.iter().zip(&means) {
                    assert!((a - b).abs() < 1e-12, "means drift along the scan");
                }
            }
        }
    }

    #[test]
    fn reversed_cascade_is_nonincreasing() {
        let c = Cascade::build(CascadeKind::Trimer12, 4.0).unwrap().reversed();
        let points = c.scan(4).unwrap();
        for pair in points.windows(2) {
            assert!(pair[1].photon_rate <= pair[0].photon_rate + 1e-12);
        }
    }

    #[test]
    fn validation_rejects_broken_cascades() {
        let bound = Ensemble::new(2, vec![Species::new("dimer", vec![1, 1], 2.0).unwrap()]).unwrap();
        let drifted = Ensemble::new(2, vec![Species::new("free_a", vec![1, 0], 5.0).unwrap()]).unwrap();
        let err = Cascade::new(
            "broken",
            vec![("a".into(), bound.clone()), ("b".into(), drifted)],
            2.0,
        )
        .unwrap_err();
        assert!(matches!(err, ScenarioError::MeanNotConserved { .. }));

        let bright = Ensemble::new(2, vec![Species::new("free_a", vec![1, 1], 2.0).unwrap()]).unwrap();
        // A single species that is NOT dark at its own minimum weights does
        // not exist for two tubes (one species always cancels itself), so
        // darkness violations arise from multi-species first stages.
        let two_species = Ensemble::new(
            2,
            vec![
                Species::new("free_a", vec![1, 0], 2.0).unwrap(),
                Species::new("free_b", vec![0, 1], 2.0).unwrap(),
            ],
        )
        .unwrap();
        let err = Cascade::new("loose", vec![("a".into(), two_species)], 2.0).unwrap_err();
        assert!(matches!(err, ScenarioError::FirstStageNotSingle(_)));

        assert!(Cascade::new("ok", vec![("a".into(), bright)], 2.0).is_ok());
        assert!(matches!(
            Cascade::build(CascadeKind::Dimer11, 0.0),
            Err(ScenarioError::BadScale(_))
        ));
        let c = Cascade::build(CascadeKind::Dimer11, 1.0).unwrap();
        assert!(matches!(c.scan(1), Err(ScenarioError::TooFewPoints(1))));
    }
}
