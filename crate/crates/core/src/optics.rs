//! Probe and detection geometry: mode functions, per-tube phase factors,
//! the diffraction-minimum spacing solver, and coupling-constant arithmetic.
//!
//! Lengths are handled in units of the light wavelength internally (so the
//! wavenumber is `2*pi`); absolute units only enter through [`CouplingParams`].

use num_complex::Complex64;
use std::f64::consts::TAU;
use thiserror::Error;

/// Errors from geometry construction and the spacing solver.
#[derive(Debug, Error, PartialEq)]
pub enum OpticsError {
    #[error("wavelength must be positive and finite, got {0}")]
    BadWavelength(f64),
    #[error("geometry needs at least one tube position")]
    NoTubes,
    #[error("tube position {0} is not finite")]
    NonFinitePosition(usize),
    #[error("tube positions {0} and {1} coincide")]
    DuplicatePositions(usize, usize),
    #[error("population ratio must be positive and finite, got {0}")]
    BadRatio(f64),
    #[error(
        "no standing-wave spacing satisfies cos(2*pi*x) = -{alpha}: \
         the ratio exceeds 1; relabel the tubes so the larger mean sits in the denominator"
    )]
    NoStandingSolution { alpha: f64 },
    #[error(
        "a traveling probe contributes a pure phase and can only cancel equal means; \
         ratio {alpha} != 1 is unsatisfiable"
    )]
    UnsatisfiableTraveling { alpha: f64 },
    #[error("hbar must be positive, got {0}")]
    BadHbar(f64),
    #[error("cavity prefactor requires a nonzero detuning")]
    ZeroDetuning,
    #[error("cavity prefactor requires a positive cavity decay rate, got {0}")]
    BadDecay(f64),
}

/// Spatial character of a light mode: `exp(iky)` or `cos(ky)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    TravelingWave,
    StandingWave,
}

/// Transverse layout of the tubes relative to the probe and detection modes.
///
/// Tube positions are coordinates along the probe axis (the `y` axis of the
/// detection plane); detection angles are measured in the plane perpendicular
/// to the tubes, from the detection axis toward the probe axis.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalGeometry {
    wavelength: f64,
    /// Tube coordinates divided by the wavelength.
    positions_wl: Vec<f64>,
    probe_kind: ModeKind,
    detection_kind: ModeKind,
}

impl OpticalGeometry {
    /// Build a geometry from absolute lengths (any consistent unit).
    pub fn new(
        wavelength: f64,
        tube_positions: Vec<f64>,
        probe_kind: ModeKind,
        detection_kind: ModeKind,
    ) -> Result<Self, OpticsError> {
        if !wavelength.is_finite() || wavelength <= 0.0 {
            return Err(OpticsError::BadWavelength(wavelength));
        }
        if tube_positions.is_empty() {
            return Err(OpticsError::NoTubes);
        }
        for (i, y) in tube_positions.iter().enumerate() {
            if !y.is_finite() {
                return Err(OpticsError::NonFinitePosition(i));
            }
        }
        for i in 0..tube_positions.len() {
            for j in (i + 1)..tube_positions.len() {
                if tube_positions[i] == tube_positions[j] {
                    return Err(OpticsError::DuplicatePositions(i, j));
                }
            }
        }
        let positions_wl = tube_positions.iter().map(|y| y / wavelength).collect();
        Ok(Self {
            wavelength,
            positions_wl,
            probe_kind,
            detection_kind,
        })
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn tube_count(&self) -> usize {
        self.positions_wl.len()
    }

    pub fn probe_kind(&self) -> ModeKind {
        self.probe_kind
    }

    pub fn detection_kind(&self) -> ModeKind {
        self.detection_kind
    }

    /// Tube coordinate in units of the wavelength.
    pub fn position_wavelengths(&self, tube_index: usize) -> f64 {
        self.positions_wl[tube_index]
    }

    /// Mode amplitude at an absolute coordinate along the probe axis:
    /// `exp(iky)` for a traveling wave, `cos(ky)` for a standing wave,
    /// with `k = 2*pi / wavelength`.
    pub fn mode_value(&self, kind: ModeKind, coordinate: f64) -> Complex64 {
        mode_at(kind, coordinate / self.wavelength)
    }

    /// Per-tube factor `u_p(y_i) * conj(u_s(y_i))` for detection at
    /// `detection_angle` (radians, measured from the detection axis toward
    /// the probe axis, restricted to the plane perpendicular to the tubes).
    ///
    /// At angle 0 the detected mode is 1 at every tube, so this reduces to
    /// the probe mode value exactly.
    ///
    /// Panics if `tube_index` is out of range.
    pub fn phase_factor(&self, tube_index: usize, detection_angle: f64) -> Complex64 {
        let x = self.positions_wl[tube_index];
        let probe = mode_at(self.probe_kind, x);
        let detected = mode_at(self.detection_kind, detection_angle.sin() * x);
        probe * detected.conj()
    }

    /// Phase factors for all tubes at one detection angle.
    pub fn phase_factors(&self, detection_angle: f64) -> Vec<Complex64> {
        (0..self.tube_count())
            .map(|i| self.phase_factor(i, detection_angle))
            .collect()
    }
}

/// Mode amplitude at a coordinate expressed in wavelengths.
fn mode_at(kind: ModeKind, x_wavelengths: f64) -> Complex64 {
    match kind {
        ModeKind::TravelingWave => Complex64::from_polar(1.0, TAU * x_wavelengths),
        ModeKind::StandingWave => Complex64::new((TAU * x_wavelengths).cos(), 0.0),
    }
}

/// Tube spacings (in units of the wavelength, principal solutions in `[0, 1)`)
/// that put the detector at a diffraction minimum for a given population
/// ratio `alpha`, with tube A held at a probe antinode.
///
/// For a standing probe these solve `cos(2*pi*x) = -alpha`; both roots are
/// returned in ascending order. Periodic replicas (adding whole wavelengths)
/// are the caller's concern. A traveling probe is a pure phase, so only
/// `alpha = 1` is satisfiable, at half-wavelength spacing.
pub fn minimum_spacings(alpha: f64, probe_kind: ModeKind) -> Result<Vec<f64>, OpticsError> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(OpticsError::BadRatio(alpha));
    }
    match probe_kind {
        ModeKind::TravelingWave => {
            if alpha == 1.0 {
                Ok(vec![0.5])
            } else {
                Err(OpticsError::UnsatisfiableTraveling { alpha })
            }
        }
        ModeKind::StandingWave => {
            if alpha > 1.0 {
                return Err(OpticsError::NoStandingSolution { alpha });
            }
            let lo = (-alpha).acos() / TAU;
            let hi = 1.0 - lo;
            if lo == hi {
                Ok(vec![lo])
            } else {
                Ok(vec![lo, hi])
            }
        }
    }
}

/// Physical constants of the probe drive and the collecting cavity.
/// Units are the caller's, as long as they are mutually consistent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    /// Induced dipole moment `d_0`.
    pub dipole_moment: f64,
    /// Probe electric field amplitude `E_p`.
    pub probe_field: f64,
    /// Reduced Planck constant in the chosen unit system (must be positive).
    pub hbar: f64,
    /// Molecule-light coupling rate `g_s`.
    pub coupling: f64,
    /// Light detuning from resonance (nonzero for the prefactor).
    pub detuning: f64,
    /// Cavity decay rate (positive for the prefactor).
    pub cavity_decay: f64,
}

impl CouplingParams {
    /// Drive amplitude `dipole_moment * probe_field / hbar`.
    pub fn rabi_frequency(&self) -> Result<f64, OpticsError> {
        if !self.hbar.is_finite() || self.hbar <= 0.0 {
            return Err(OpticsError::BadHbar(self.hbar));
        }
        Ok(self.dipole_moment * self.probe_field / self.hbar)
    }

    /// Cavity-enhanced scattering prefactor
    /// `-i * coupling * rabi_frequency / (detuning * cavity_decay)`.
    ///
    /// Its squared modulus is the intensity unit used throughout.
    pub fn cavity_prefactor(&self) -> Result<Complex64, OpticsError> {
        if self.detuning == 0.0 || !self.detuning.is_finite() {
            return Err(OpticsError::ZeroDetuning);
        }
        if !self.cavity_decay.is_finite() || self.cavity_decay <= 0.0 {
            return Err(OpticsError::BadDecay(self.cavity_decay));
        }
        let rabi = self.rabi_frequency()?;
        Ok(Complex64::new(0.0, -1.0) * self.coupling * rabi / (self.detuning * self.cavity_decay))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standing_geometry(positions: Vec<f64>) -> OpticalGeometry {
        OpticalGeometry::new(1.0, positions, ModeKind::StandingWave, ModeKind::TravelingWave)
            .unwrap()
    }

    #[test]
    fn mode_value_antinode_is_one() {
        let g = standing_geometry(vec![0.0, 0.5]);
        let v = g.mode_value(ModeKind::StandingWave, 0.0);
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn mode_value_node_is_zero() {
        let g = standing_geometry(vec![0.0, 0.5]);
        let v = g.mode_value(ModeKind::StandingWave, 0.25);
        assert!(v.norm() < 1e-15, "node value {v}");
    }

    #[test]
    fn mode_value_half_wavelength_traveling_phase() {
        let g = standing_geometry(vec![0.0, 0.5]);
        let v = g.mode_value(ModeKind::TravelingWave, 0.5);
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn traveling_mode_has_unit_modulus() {
        let g = standing_geometry(vec![0.0, 0.3]);
        for y in [-3.7, -0.1, 0.0, 0.2, 1.9, 12.5] {
            assert!((g.mode_value(ModeKind::TravelingWave, y).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_factor_half_wavelength_spacing_is_opposite() {
        let g = standing_geometry(vec![0.0, 0.5]);
        assert_eq!(g.phase_factor(0, 0.0), Complex64::new(1.0, 0.0));
        let f_b = g.phase_factor(1, 0.0);
        assert!((f_b - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn phase_factor_at_zero_angle_equals_probe_mode() {
        let g = OpticalGeometry::new(
            0.78,
            vec![0.1, 0.37, -0.4],
            ModeKind::TravelingWave,
            ModeKind::StandingWave,
        )
        .unwrap();
        for i in 0..3 {
            let expected = g.mode_value(ModeKind::TravelingWave, g.position_wavelengths(i) * 0.78);
            assert_eq!(g.phase_factor(i, 0.0), expected);
        }
    }

    // Forward scattering at 90 degrees: probe and detected phases cancel at
    // the tube, matching a direct evaluation of exp(i(k_p - k_s).r).
    #[test]
    fn phase_factor_forward_cancellation() {
        let g = OpticalGeometry::new(
            1.0,
            vec![0.25],
            ModeKind::TravelingWave,
            ModeKind::TravelingWave,
        )
        .unwrap();
        let theta = std::f64::consts::FRAC_PI_2;
        let f = g.phase_factor(0, theta);

        // Oracle: k_p = k*yhat, k_s = k*(sin(theta) yhat + cos(theta) zhat),
        // tube at r = (y, z) = (0.25, 0).
        let k = TAU;
        let phase = k * 0.25 - k * theta.sin() * 0.25;
        let oracle = Complex64::from_polar(1.0, phase);
        assert!((f - oracle).norm() < 1e-12);
        assert!((f - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn geometry_rejects_bad_inputs() {
        let e = OpticalGeometry::new(0.0, vec![0.0], ModeKind::StandingWave, ModeKind::StandingWave);
        assert_eq!(e.unwrap_err(), OpticsError::BadWavelength(0.0));
        let e = OpticalGeometry::new(1.0, vec![], ModeKind::StandingWave, ModeKind::StandingWave);
        assert_eq!(e.unwrap_err(), OpticsError::NoTubes);
        let e = OpticalGeometry::new(
            1.0,
            vec![0.3, 0.3],
            ModeKind::StandingWave,
            ModeKind::StandingWave,
        );
        assert_eq!(e.unwrap_err(), OpticsError::DuplicatePositions(0, 1));
    }

    #[test]
    fn spacings_equal_means_give_half_wavelength() {
        assert_eq!(minimum_spacings(1.0, ModeKind::StandingWave).unwrap(), vec![0.5]);
        assert_eq!(minimum_spacings(1.0, ModeKind::TravelingWave).unwrap(), vec![0.5]);
    }

    #[test]
    fn spacings_half_ratio_gives_thirds() {
        let s = minimum_spacings(0.5, ModeKind::StandingWave).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s[0] - 1.0 / 3.0).abs() < 1e-9);
        assert!((s[1] - 2.0 / 3.0).abs() < 1e-9);
    }

    // Independent bisection on cos(2*pi*x) + 1/3 = 0 over [0.25, 0.5].
    fn bisect_third_ratio_root() -> f64 {
        let alpha = 1.0 / 3.0;
        let f = |x: f64| (TAU * x).cos() + alpha;
        let (mut lo, mut hi) = (0.25, 0.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn spacings_third_ratio_matches_root_find() {
        let s = minimum_spacings(1.0 / 3.0, ModeKind::StandingWave).unwrap();
        let root = bisect_third_ratio_root();
        assert!((s[0] - root).abs() < 1e-12);
        assert!((s[1] - (1.0 - root)).abs() < 1e-12);
        assert!((s[0] - 0.304087).abs() < 1e-6);
        assert!((s[1] - 0.695913).abs() < 1e-6);
    }

    #[test]
    fn spacings_reject_out_of_range_ratios() {
        assert!(matches!(
            minimum_spacings(2.0, ModeKind::StandingWave),
            Err(OpticsError::NoStandingSolution { .. })
        ));
        assert!(matches!(
            minimum_spacings(0.5, ModeKind::TravelingWave),
            Err(OpticsError::UnsatisfiableTraveling { .. })
        ));
        assert!(matches!(
            minimum_spacings(0.0, ModeKind::StandingWave),
            Err(OpticsError::BadRatio(_))
        ));
        assert!(matches!(
            minimum_spacings(-1.0, ModeKind::StandingWave),
            Err(OpticsError::BadRatio(_))
        ));
    }

    #[test]
    fn rabi_frequency_is_bilinear_in_drive() {
        let mut p = CouplingParams {
            dipole_moment: 1.0,
            probe_field: 2.0,
            hbar: 1.0,
            coupling: 1.0,
            detuning: 1.0,
            cavity_decay: 1.0,
        };
        assert_eq!(p.rabi_frequency().unwrap(), 2.0);
        p.probe_field = 4.0;
        assert_eq!(p.rabi_frequency().unwrap(), 4.0);
        p.dipole_moment = 0.0;
        assert_eq!(p.rabi_frequency().unwrap(), 0.0);
        p.hbar = 0.0;
        assert!(matches!(p.rabi_frequency(), Err(OpticsError::BadHbar(_))));
    }

    #[test]
    fn cavity_prefactor_unit_values() {
        let p = CouplingParams {
            dipole_moment: 1.0,
            probe_field: 1.0,
            hbar: 1.0,
            coupling: 1.0,
            detuning: 1.0,
            cavity_decay: 1.0,
        };
        assert_eq!(p.cavity_prefactor().unwrap(), Complex64::new(0.0, -1.0));

        let uncoupled = CouplingParams { coupling: 0.0, ..p };
        assert_eq!(uncoupled.cavity_prefactor().unwrap(), Complex64::new(0.0, 0.0));

        let flipped = CouplingParams { detuning: -1.0, ..p };
        let c = p.cavity_prefactor().unwrap();
        let c_flipped = flipped.cavity_prefactor().unwrap();
        assert!((c.norm_sqr() - c_flipped.norm_sqr()).abs() < 1e-15);

        let resonant = CouplingParams { detuning: 0.0, ..p };
        assert_eq!(resonant.cavity_prefactor().unwrap_err(), OpticsError::ZeroDetuning);
        let undamped = CouplingParams { cavity_decay: 0.0, ..p };
        assert_eq!(undamped.cavity_prefactor().unwrap_err(), OpticsError::BadDecay(0.0));
    }
}
