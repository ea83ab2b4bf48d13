//! The subcommand implementations. Each builds library types from the run
//! document, computes, and emits one CSV table.

use crate::document::{
    CascadeDoc, DirectionDoc, OutputDoc, RunDocument, ScanDoc, WeightSetDoc,
};
use crate::error::CliError;
use crate::report::{format_complex, format_sig, CsvTable, DEFAULT_PRECISION};
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use tubescatter::montecarlo::{estimate_scan, McConfig};
use tubescatter::optics::{minimum_spacings, ModeKind};
use tubescatter::scenarios::{Cascade, CascadeKind};
use tubescatter::statistics::Ensemble;

/// Resolved output target and precision (flags beat the document).
pub struct OutputOpts {
    pub path: Option<PathBuf>,
    pub precision: usize,
}

impl OutputOpts {
    pub fn resolve(
        doc: Option<&OutputDoc>,
        flag_path: Option<PathBuf>,
        flag_precision: Option<usize>,
    ) -> Self {
        Self {
            path: flag_path.or_else(|| doc.and_then(|o| o.path.clone())),
            precision: flag_precision
                .or_else(|| doc.and_then(|o| o.precision))
                .unwrap_or(DEFAULT_PRECISION),
        }
    }

    fn target(&self) -> Option<&Path> {
        self.path.as_deref()
    }
}

/// Seed precedence: flag, then document, then `TUBESCATTER_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>, doc_seed: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag.or(doc_seed) {
        return Ok(seed);
    }
    match std::env::var("TUBESCATTER_SEED") {
        Ok(value) => value.trim().parse().map_err(|_| {
            CliError::Parse(format!(
                "TUBESCATTER_SEED must be an unsigned 64-bit integer, got `{value}`"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(CliError::Parse(format!("TUBESCATTER_SEED: {e}"))),
    }
}

/// `p/q` rationals or plain decimals.
pub fn parse_ratio(text: &str) -> Result<f64, CliError> {
    let bad = || CliError::Parse(format!("cannot parse ratio `{text}`"));
    let value = match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            num / den
        }
        None => text.trim().parse().map_err(|_| bad())?,
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

fn intensity_unit(doc: &RunDocument) -> Result<Option<f64>, CliError> {
    doc.coupling
        .as_ref()
        .map(|c| c.intensity_unit())
        .transpose()
}

fn weight_cell(label: &str, weights: &[Complex64], precision: usize) -> String {
    let values: Vec<String> = weights
        .iter()
        .map(|w| format_complex(*w, precision))
        .collect();
    format!("{label}({})", values.join("; "))
}

pub fn cmd_intensity(
    doc: &RunDocument,
    flag_output: Option<PathBuf>,
    flag_precision: Option<usize>,
) -> Result<(), CliError> {
    let geometry = doc.geometry()?.build()?;
    let ensemble = doc.ensemble()?.build()?;
    if geometry.tube_count() != ensemble.tube_count() {
        return Err(CliError::Validation(format!(
            "geometry has {} tubes, ensemble has {}",
            geometry.tube_count(),
            ensemble.tube_count()
        )));
    }
    let sets = doc
        .intensity
        .as_ref()
        .map(|i| i.weights.clone())
        .unwrap_or_else(|| vec![WeightSetDoc::Geometry]);
    let unit = intensity_unit(doc)?;
    let opts = OutputOpts::resolve(doc.output.as_ref(), flag_output, flag_precision);

    let mut header = vec![
        "weights",
        "coherent_part_per_C2",
        "fluctuation_part_per_C2",
        "photon_rate_per_C2",
    ];
    if unit.is_some() {
        header.push("photon_rate_absolute");
    }
    let mut table = CsvTable::new(&header);
    for set in sets {
        let (label, weights) = match set {
            WeightSetDoc::Geometry => ("geometry", geometry.phase_factors(0.0)),
            WeightSetDoc::Minimum => {
                let alpha = ensemble
                    .population_ratio()
                    .map_err(|e| CliError::Validation(e.to_string()))?;
                // The requested cancellation must be realizable by the probe
                // before it is reported.
                minimum_spacings(alpha, geometry.probe_kind())
                    .map_err(|e| CliError::Geometry(e.to_string()))?;
                let weights = ensemble
                    .minimum_weights()
                    .map_err(|e| CliError::Validation(e.to_string()))?;
                ("minimum", weights)
            }
        };
        let report = ensemble
            .intensity(&weights)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        let mut row = vec![
            weight_cell(label, &weights, opts.precision),
            format_sig(report.coherent_part, opts.precision),
            format_sig(report.fluctuation_part, opts.precision),
            format_sig(report.photon_rate, opts.precision),
        ];
        if let Some(unit) = unit {
            row.push(format_sig(report.photon_rate * unit, opts.precision));
        }
        table.push_row(row);
    }
    table.write(opts.target())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_scan(
    doc: &RunDocument,
    flag_points: Option<usize>,
    flag_samples: Option<u64>,
    flag_seed: Option<u64>,
    flag_output: Option<PathBuf>,
    flag_precision: Option<usize>,
) -> Result<(), CliError> {
    let cascade = doc.cascade()?.build()?;
    let scan_doc = doc.scan.as_ref();
    let cascade = match scan_doc.and_then(|s| s.direction) {
        Some(DirectionDoc::Association) => cascade.reversed(),
        _ => cascade,
    };
    let points_per_stage = flag_points
        .or_else(|| scan_doc.and_then(|s| s.points_per_stage))
        .unwrap_or(2);
    let points = cascade
        .scan_with_ensembles(points_per_stage)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let weights = cascade
        .minimum_weights()
        .map_err(|e| CliError::Validation(e.to_string()))?;

    // Monte Carlo columns appear when the document carries a [montecarlo]
    // section or the sample budget is forced from the command line.
    let mc_config: Option<McConfig> = match (&doc.montecarlo, flag_samples) {
        (Some(mc), _) => {
            let seed = resolve_seed(flag_seed, mc.seed)?;
            let mut config = mc.config(seed)?;
            if let Some(samples) = flag_samples {
                config.samples = samples;
            }
            Some(config)
        }
        (None, Some(samples)) => Some(McConfig::counts(samples, resolve_seed(flag_seed, None)?)),
        (None, None) => None,
    };
    let estimates = match &mc_config {
        Some(config) => {
            let ensembles: Vec<Ensemble> = points.iter().map(|(_, e)| e.clone()).collect();
            Some(
                estimate_scan(&ensembles, &weights, config)
                    .map_err(|e| CliError::Validation(e.to_string()))?,
            )
        }
        None => None,
    };

    let unit = intensity_unit(doc)?;
    let opts = OutputOpts::resolve(doc.output.as_ref(), flag_output, flag_precision);
    let mut header = vec![
        "parameter",
        "stage_label",
        "bound_fraction",
        "photon_rate_per_C2",
    ];
    if estimates.is_some() {
        header.push("mc_mean_per_C2");
        header.push("mc_stderr_per_C2");
    }
    if unit.is_some() {
        header.push("photon_rate_absolute");
    }
    let mut table = CsvTable::new(&header);
    for (i, (point, _)) in points.iter().enumerate() {
        let mut row = vec![
            format_sig(point.parameter, opts.precision),
            cascade.stages()[point.stage_index].0.clone(),
            format_sig(point.bound_fraction, opts.precision),
            format_sig(point.photon_rate, opts.precision),
        ];
        if let Some(estimates) = &estimates {
            row.push(format_sig(estimates[i].photon_rate_mean, opts.precision));
            row.push(format_sig(estimates[i].photon_rate_stderr, opts.precision));
        }
        if let Some(unit) = unit {
            row.push(format_sig(point.photon_rate * unit, opts.precision));
        }
        table.push_row(row);
    }
    table.write(opts.target())
}

pub fn cmd_minimum(
    alpha_text: &str,
    probe: ModeKind,
    flag_output: Option<PathBuf>,
) -> Result<(), CliError> {
    let alpha = parse_ratio(alpha_text)?;
    let spacings =
        minimum_spacings(alpha, probe).map_err(|e| CliError::Geometry(e.to_string()))?;
    let mut table = CsvTable::new(&["delta_over_lambda", "cos_2pi_delta"]);
    for x in spacings {
        table.push_row(vec![
            format!("{x:.6}"),
            format!("{:.6}", (TAU * x).cos()),
        ]);
    }
    table.write(flag_output.as_deref())
}

pub fn cmd_pattern(
    doc: &RunDocument,
    flag_output: Option<PathBuf>,
    flag_precision: Option<usize>,
) -> Result<(), CliError> {
    let geometry = doc.geometry()?.build()?;
    let ensemble = doc.ensemble()?.build()?;
    if geometry.tube_count() != ensemble.tube_count() {
        return Err(CliError::Validation(format!(
            "geometry has {} tubes, ensemble has {}",
            geometry.tube_count(),
            ensemble.tube_count()
        )));
    }
    let grid = doc.pattern()?.angle_grid()?;
    let unit = intensity_unit(doc)?;
    let opts = OutputOpts::resolve(doc.output.as_ref(), flag_output, flag_precision);

    let mut header = vec!["angle_rad", "photon_rate_per_C2", "coherent_part_per_C2"];
    if unit.is_some() {
        header.push("photon_rate_absolute");
    }
    let mut table = CsvTable::new(&header);
    for angle in grid {
        let weights = geometry.phase_factors(angle);
        let report = ensemble
            .intensity(&weights)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        let mut row = vec![
            format_sig(angle, opts.precision),
            format_sig(report.photon_rate, opts.precision),
            format_sig(report.coherent_part, opts.precision),
        ];
        if let Some(unit) = unit {
            row.push(format_sig(report.photon_rate * unit, opts.precision));
        }
        table.push_row(row);
    }
    table.write(opts.target())
}

pub fn cmd_export_cascade(
    kind: CascadeKind,
    n: f64,
    flag_output: Option<PathBuf>,
) -> Result<(), CliError> {
    let cascade = Cascade::build(kind, n).map_err(|e| CliError::Validation(e.to_string()))?;
    let mut doc = RunDocument::empty();
    doc.cascade = Some(CascadeDoc::from_cascade(&cascade));
    doc.scan = Some(ScanDoc {
        points_per_stage: Some(2),
        direction: None,
    });
    let text = toml::to_string_pretty(&doc)
        .map_err(|e| CliError::Io(format!("cannot serialize cascade: {e}")))?;
    match flag_output {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
