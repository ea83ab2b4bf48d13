//! The versioned TOML run document and its conversion into library types.
//!
//! Unknown keys are rejected by serde, and the TOML parser reports the
//! offending line and column. All document-shape problems map to the parse
//! exit code; value problems map to geometry or validation codes depending
//! on which side of the model they sit.

use crate::error::CliError;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use tubescatter::montecarlo::McConfig;
use tubescatter::optics::{CouplingParams, ModeKind, OpticalGeometry};
use tubescatter::scenarios::{Cascade, CascadeKind};
use tubescatter::statistics::{BeamProfile, Ensemble, ProfileShape, Species};

pub const DOCUMENT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDocument {
    pub version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cascade: Option<CascadeDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intensity: Option<IntensityDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub montecarlo: Option<MonteCarloDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingDoc>,
}

impl RunDocument {
    pub fn empty() -> Self {
        Self {
            version: DOCUMENT_VERSION,
            geometry: None,
            ensemble: None,
            cascade: None,
            intensity: None,
            scan: None,
            pattern: None,
            montecarlo: None,
            output: None,
            coupling: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let doc: RunDocument =
            toml::from_str(text).map_err(|e| CliError::Parse(format!("run document: {e}")))?;
        if doc.version != DOCUMENT_VERSION {
            return Err(CliError::Parse(format!(
                "run document version {} is not supported (expected {DOCUMENT_VERSION})",
                doc.version
            )));
        }
        Ok(doc)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn geometry(&self) -> Result<&GeometryDoc, CliError> {
        self.geometry
            .as_ref()
            .ok_or_else(|| CliError::Parse("missing [geometry] section".into()))
    }

    pub fn ensemble(&self) -> Result<&EnsembleDoc, CliError> {
        self.ensemble
            .as_ref()
            .ok_or_else(|| CliError::Parse("missing [ensemble] section".into()))
    }

    pub fn cascade(&self) -> Result<&CascadeDoc, CliError> {
        self.cascade
            .as_ref()
            .ok_or_else(|| CliError::Parse("missing [cascade] section".into()))
    }

    pub fn pattern(&self) -> Result<&PatternDoc, CliError> {
        self.pattern
            .as_ref()
            .ok_or_else(|| CliError::Parse("missing [pattern] section".into()))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ModeKindDoc {
    Traveling,
    Standing,
}

impl From<ModeKindDoc> for ModeKind {
    fn from(kind: ModeKindDoc) -> Self {
        match kind {
            ModeKindDoc::Traveling => ModeKind::TravelingWave,
            ModeKindDoc::Standing => ModeKind::StandingWave,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryDoc {
    pub wavelength: f64,
    pub tube_positions: Vec<f64>,
    pub probe: ModeKindDoc,
    pub detection: ModeKindDoc,
}

impl GeometryDoc {
    pub fn build(&self) -> Result<OpticalGeometry, CliError> {
        OpticalGeometry::new(
            self.wavelength,
            self.tube_positions.clone(),
            self.probe.into(),
            self.detection.into(),
        )
        .map_err(|e| CliError::Geometry(e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesDoc {
    pub name: String,
    pub composition: Vec<u32>,
    pub mean_count: f64,
}

impl SpeciesDoc {
    fn build(&self) -> Result<Species, CliError> {
        Species::new(self.name.clone(), self.composition.clone(), self.mean_count)
            .map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn from_species(s: &Species) -> Self {
        Self {
            name: s.name().to_owned(),
            composition: s.composition().to_vec(),
            mean_count: s.mean_count(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleDoc {
    pub tubes: usize,
    #[serde(default)]
    pub species: Vec<SpeciesDoc>,
}

impl EnsembleDoc {
    pub fn build(&self) -> Result<Ensemble, CliError> {
        let species = self
            .species
            .iter()
            .map(SpeciesDoc::build)
            .collect::<Result<Vec<_>, _>>()?;
        Ensemble::new(self.tubes, species).map_err(|e| CliError::Validation(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum KindDoc {
    Dimer11,
    Trimer12,
    Tetramer13,
    Tetramer22,
}

impl From<KindDoc> for CascadeKind {
    fn from(kind: KindDoc) -> Self {
        match kind {
            KindDoc::Dimer11 => CascadeKind::Dimer11,
            KindDoc::Trimer12 => CascadeKind::Trimer12,
            KindDoc::Tetramer13 => CascadeKind::Tetramer13,
            KindDoc::Tetramer22 => CascadeKind::Tetramer22,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageDoc {
    pub label: String,
    pub species: Vec<SpeciesDoc>,
}

/// Either a built-in cascade (`kind` + `n`) or inline `stages` over `tubes`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<KindDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tubes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stages: Option<Vec<StageDoc>>,
}

impl CascadeDoc {
    pub fn build(&self) -> Result<Cascade, CliError> {
        match (&self.kind, &self.stages) {
            (Some(kind), None) => {
                let n = self.n.ok_or_else(|| {
                    CliError::Parse("[cascade] with a kind needs `n`".into())
                })?;
                Cascade::build((*kind).into(), n).map_err(|e| CliError::Validation(e.to_string()))
            }
            (None, Some(stages)) => {
                let tubes = self.tubes.ok_or_else(|| {
                    CliError::Parse("[cascade] with inline stages needs `tubes`".into())
                })?;
                let built = stages
                    .iter()
                    .map(|stage| {
                        let species = stage
                            .species
                            .iter()
                            .map(SpeciesDoc::build)
                            .collect::<Result<Vec<_>, _>>()?;
                        let ensemble = Ensemble::new(tubes, species)
                            .map_err(|e| CliError::Validation(e.to_string()))?;
                        Ok((stage.label.clone(), ensemble))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                let name = self.name.clone().unwrap_or_else(|| "cascade".into());
                Cascade::new(name, built, self.scale.unwrap_or(1.0))
                    .map_err(|e| CliError::Validation(e.to_string()))
            }
            (Some(_), Some(_)) => Err(CliError::Parse(
                "[cascade] takes either a kind or inline stages, not both".into(),
            )),
            (None, None) => Err(CliError::Parse(
                "[cascade] needs a kind or inline stages".into(),
            )),
        }
    }

    pub fn from_cascade(cascade: &Cascade) -> Self {
        Self {
            kind: None,
            n: None,
            name: Some(cascade.name().to_owned()),
            tubes: Some(cascade.tube_count()),
            scale: Some(cascade.molecule_scale()),
            stages: Some(
                cascade
                    .stages()
                    .iter()
                    .map(|(label, ensemble)| StageDoc {
                        label: label.clone(),
                        species: ensemble
                            .species()
                            .iter()
                            .map(SpeciesDoc::from_species)
                            .collect(),
                    })
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum WeightSetDoc {
    /// Phase factors of the document geometry at zero detection angle.
    Geometry,
    /// Amplitude-cancelling weights from the ensemble's population ratio.
    Minimum,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntensityDoc {
    pub weights: Vec<WeightSetDoc>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum DirectionDoc {
    Dissociation,
    Association,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points_per_stage: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<DirectionDoc>,
}

/// Detection angle grid: an explicit list, or an inclusive linear range.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

impl PatternDoc {
    pub fn angle_grid(&self) -> Result<Vec<f64>, CliError> {
        let grid = match (&self.angles, self.start, self.stop, self.count) {
            (Some(list), None, None, None) => list.clone(),
            (None, Some(start), Some(stop), Some(count)) => {
                if count == 0 {
                    return Err(CliError::Parse("[pattern] count must be at least 1".into()));
                }
                if count == 1 {
                    vec![start]
                } else {
                    (0..count)
                        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                        .collect()
                }
            }
            _ => {
                return Err(CliError::Parse(
                    "[pattern] needs either `angles` or `start`/`stop`/`count`".into(),
                ))
            }
        };
        for &angle in &grid {
            if !angle.is_finite() || angle.abs() >= std::f64::consts::FRAC_PI_2 {
                return Err(CliError::Geometry(format!(
                    "detection angle {angle} lies outside the open interval (-pi/2, pi/2); \
                     detection stays in the plane perpendicular to the tubes"
                )));
            }
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ShapeDoc {
    Tophat,
    Gaussian,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDoc {
    pub shape: ShapeDoc,
    pub width: f64,
    pub tube_length: f64,
}

impl ProfileDoc {
    pub fn build(&self) -> Result<BeamProfile, CliError> {
        let shape = match self.shape {
            ShapeDoc::Tophat => ProfileShape::TopHat,
            ShapeDoc::Gaussian => ProfileShape::Gaussian,
        };
        BeamProfile::new(shape, self.width, self.tube_length)
            .map_err(|e| CliError::Validation(e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloDoc {
    pub samples: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position_resolved: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileDoc>,
}

impl MonteCarloDoc {
    pub fn config(&self, seed: u64) -> Result<McConfig, CliError> {
        Ok(McConfig {
            samples: self.samples,
            seed,
            position_resolved: self.position_resolved.unwrap_or(false),
            profile: self.profile.as_ref().map(|p| p.build()).transpose()?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingDoc {
    pub dipole_moment: f64,
    pub probe_field: f64,
    pub hbar: f64,
    pub coupling: f64,
    pub detuning: f64,
    pub cavity_decay: f64,
}

impl CouplingDoc {
    /// Squared modulus of the cavity prefactor, for absolute photon rates.
    pub fn intensity_unit(&self) -> Result<f64, CliError> {
        let params = CouplingParams {
            dipole_moment: self.dipole_moment,
            probe_field: self.probe_field,
            hbar: self.hbar,
            coupling: self.coupling,
            detuning: self.detuning,
            cavity_decay: self.cavity_decay,
        };
        params
            .cavity_prefactor()
            .map(|c| c.norm_sqr())
            .map_err(|e| CliError::Validation(e.to_string()))
    }
}
