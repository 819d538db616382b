//! Strict TOML run configuration.
//!
//! Unknown keys are rejected everywhere, and every dimensional key carries
//! its unit in the name (`density_m3`, `wavelength_um`, `tau0_fs`, ...) —
//! unit mistakes are the dominant failure mode in this domain, so the
//! schema refuses to let them hide.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use biphoton_plasma::biphoton::{
    CoincidenceWindow, Filter, InterferometerConfig, LinearGrowthModel, PathConfiguration,
    ScalingLaw,
};
use biphoton_plasma::chord::{ChordProfile, ChordShape};
use biphoton_plasma::constants::Constants;
use biphoton_plasma::dispersion::{Polarization, ProbeWave};
use biphoton_plasma::plasma::{PlasmaState, Species};

use crate::run::CliError;

/// Femtoseconds to seconds.
pub(crate) const FS: f64 = 1e-15;
/// Micrometres to metres.
pub(crate) const UM: f64 = 1e-6;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn missing(section: &str) -> CliError {
    invalid(format!(
        "config section {section} is required for this subcommand"
    ))
}

/// The whole run configuration. Every section is optional at load time;
/// each subcommand demands the sections it needs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Free-form scenario label, echoed into JSON output.
    pub scenario: Option<String>,
    pub plasma: Option<PlasmaSection>,
    pub probe: Option<ProbeSection>,
    pub chord: Option<ChordSection>,
    pub paths: Option<PathsSection>,
    pub interferometer: Option<InterferometerSection>,
    pub linear_growth: Option<LinearGrowthSection>,
    pub mc: Option<McSection>,
    pub scaling: Option<ScalingSection>,
    pub sensitivity: Option<SensitivitySection>,
    pub fit: Option<FitSection>,
    pub outputs: Option<OutputsSection>,
}

impl RunConfig {
    /// Loads and parses the file, rejecting unknown keys with a
    /// path-to-field message.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let path = path
            .ok_or_else(|| invalid("--config PATH is required for this subcommand"))?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| invalid(format!("config {}: {e}", path.display())))
    }

    pub fn plasma(&self) -> Result<&PlasmaSection, CliError> {
        self.plasma.as_ref().ok_or_else(|| missing("[plasma]"))
    }

    pub fn probe(&self) -> Result<&ProbeSection, CliError> {
        self.probe.as_ref().ok_or_else(|| missing("[probe]"))
    }

    pub fn chord(&self) -> Result<&ChordSection, CliError> {
        self.chord.as_ref().ok_or_else(|| missing("[chord]"))
    }

    pub fn interferometer(&self) -> Result<&InterferometerSection, CliError> {
        self.interferometer
            .as_ref()
            .ok_or_else(|| missing("[interferometer]"))
    }

    pub fn linear_growth(&self) -> Result<&LinearGrowthSection, CliError> {
        self.linear_growth
            .as_ref()
            .ok_or_else(|| missing("[linear_growth]"))
    }

    pub fn mc(&self) -> Result<&McSection, CliError> {
        self.mc.as_ref().ok_or_else(|| missing("[mc]"))
    }

    pub fn scaling(&self) -> Result<&ScalingSection, CliError> {
        self.scaling.as_ref().ok_or_else(|| missing("[scaling]"))
    }

    pub fn sensitivity(&self) -> Result<&SensitivitySection, CliError> {
        self.sensitivity
            .as_ref()
            .ok_or_else(|| missing("[sensitivity]"))
    }

    pub fn fit(&self) -> Result<&FitSection, CliError> {
        self.fit.as_ref().ok_or_else(|| missing("[fit]"))
    }

    /// Path layout, defaulting to a single dispersive path.
    pub fn path_mode(&self) -> Result<PathConfiguration, CliError> {
        let kind = self
            .paths
            .as_ref()
            .map(|p| p.configuration)
            .unwrap_or(PathKind::Single);
        let pol = self
            .probe
            .as_ref()
            .map(|p| p.polarization)
            .unwrap_or(PolarizationKey::R);
        Ok(match (kind, pol) {
            (PathKind::Single, PolarizationKey::R) => PathConfiguration::SingleR,
            (PathKind::Single, PolarizationKey::L) => PathConfiguration::SingleL,
            (PathKind::DoubleSymmetric, PolarizationKey::R) => {
                PathConfiguration::DoubleSymmetricR
            }
            (PathKind::DoubleSymmetric, PolarizationKey::L) => {
                PathConfiguration::DoubleSymmetricL
            }
            (PathKind::DoubleAntisymmetric, _) => PathConfiguration::DoubleAntisymmetric,
        })
    }
}

// ---------------------------------------------------------------------------
// Plasma
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlasmaSection {
    /// Axial magnetic field (T).
    #[serde(default)]
    pub b0_tesla: f64,
    /// The species present; empty means vacuum.
    #[serde(default)]
    pub species: Vec<SpeciesSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeciesKind {
    Electron,
    HydrogenIon,
    Helium4Ion,
    Custom,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesSection {
    pub kind: SpeciesKind,
    /// Number density (m^-3).
    pub density_m3: f64,
    /// Perpendicular temperature (eV), optional.
    pub t_perp_ev: Option<f64>,
    /// Field-aligned drift (m/s), optional.
    pub v_parallel_m_s: Option<f64>,
    /// Custom species only: label.
    pub name: Option<String>,
    /// Custom species only: signed charge number Z (electron: -1).
    pub charge_number: Option<i32>,
    /// Custom species only: mass as a multiple of the electron mass.
    pub mass_ratio: Option<f64>,
}

impl PlasmaSection {
    pub fn build(&self) -> Result<PlasmaState<f64>, CliError> {
        let mut species = Vec::with_capacity(self.species.len());
        for (i, s) in self.species.iter().enumerate() {
            species.push(s.build(i)?);
        }
        Ok(PlasmaState::new(species, self.b0_tesla)?)
    }

    /// Perpendicular temperature (eV) of the first electron species that
    /// sets one; used as the ratio-table electron temperature.
    pub fn electron_t_perp_ev(&self) -> Option<f64> {
        self.species
            .iter()
            .find(|s| s.kind == SpeciesKind::Electron)
            .and_then(|s| s.t_perp_ev)
    }

    pub fn has_electron(&self) -> bool {
        self.species.iter().any(|s| s.kind == SpeciesKind::Electron)
    }
}

impl SpeciesSection {
    fn build(&self, index: usize) -> Result<Species<f64>, CliError> {
        let here = |msg: String| invalid(format!("plasma.species[{index}]: {msg}"));
        if self.kind != SpeciesKind::Custom
            && (self.name.is_some() || self.charge_number.is_some() || self.mass_ratio.is_some())
        {
            return Err(here(
                "name, charge_number, and mass_ratio are only valid for kind = \"custom\""
                    .to_string(),
            ));
        }
        let mut built = match self.kind {
            SpeciesKind::Electron => Species::electron(self.density_m3)?,
            SpeciesKind::HydrogenIon => Species::hydrogen_ion(self.density_m3)?,
            SpeciesKind::Helium4Ion => Species::helium4_ion(self.density_m3)?,
            SpeciesKind::Custom => {
                let name = self
                    .name
                    .clone()
                    .ok_or_else(|| here("custom species needs a name".to_string()))?;
                let z = self
                    .charge_number
                    .ok_or_else(|| here("custom species needs charge_number".to_string()))?;
                let ratio = self
                    .mass_ratio
                    .ok_or_else(|| here("custom species needs mass_ratio".to_string()))?;
                Species::new(
                    name,
                    z,
                    ratio * Constants::<f64>::si().m_e,
                    self.density_m3,
                )?
            }
        };
        if let Some(t) = self.t_perp_ev {
            built = built.with_t_perp_ev(t)?;
        }
        if let Some(v) = self.v_parallel_m_s {
            built = built.with_v_parallel(v)?;
        }
        Ok(built)
    }
}

// ---------------------------------------------------------------------------
// Probe and chord
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum PolarizationKey {
    R,
    L,
}

impl From<PolarizationKey> for Polarization {
    fn from(p: PolarizationKey) -> Self {
        match p {
            PolarizationKey::R => Polarization::R,
            PolarizationKey::L => Polarization::L,
        }
    }
}

fn default_polarization() -> PolarizationKey {
    PolarizationKey::R
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    /// Vacuum wavelength (um).
    pub wavelength_um: f64,
    /// Circular mode, "R" (default) or "L".
    #[serde(default = "default_polarization")]
    pub polarization: PolarizationKey,
}

impl ProbeSection {
    pub fn build(&self) -> Result<ProbeWave<f64>, CliError> {
        Ok(ProbeWave::from_wavelength(
            self.wavelength_um * UM,
            self.polarization.into(),
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Uniform,
    Gaussian,
    Table,
}

impl Default for ProfileKind {
    fn default() -> Self {
        ProfileKind::Uniform
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChordSection {
    /// Path length through the plasma (m).
    pub length_m: f64,
    /// Density-scale profile along the path (default uniform).
    #[serde(default)]
    pub profile: ProfileKind,
    /// Gaussian profile only: peak position (m).
    pub gaussian_center_m: Option<f64>,
    /// Gaussian profile only: width (m).
    pub gaussian_width_m: Option<f64>,
    /// Table profile only: positions (m), strictly increasing.
    pub table_position_m: Option<Vec<f64>>,
    /// Table profile only: density scale at each position.
    pub table_scale: Option<Vec<f64>>,
    /// Scale B0 by the profile too (default false).
    pub scale_b0: Option<bool>,
    /// Simpson node count (odd, >= 3).
    pub quadrature_points: Option<usize>,
}

impl ChordSection {
    pub fn build(&self) -> Result<ChordProfile<f64>, CliError> {
        let gaussian_keys = self.gaussian_center_m.is_some() || self.gaussian_width_m.is_some();
        let table_keys = self.table_position_m.is_some() || self.table_scale.is_some();
        let shape = match self.profile {
            ProfileKind::Uniform => {
                if gaussian_keys || table_keys {
                    return Err(invalid(
                        "chord: gaussian_*/table_* keys require profile = \"gaussian\"/\"table\"",
                    ));
                }
                ChordShape::Uniform
            }
            ProfileKind::Gaussian => {
                if table_keys {
                    return Err(invalid("chord: table_* keys are invalid for a gaussian profile"));
                }
                ChordShape::Gaussian {
                    center: self
                        .gaussian_center_m
                        .ok_or_else(|| invalid("chord: gaussian profile needs gaussian_center_m"))?,
                    width: self
                        .gaussian_width_m
                        .ok_or_else(|| invalid("chord: gaussian profile needs gaussian_width_m"))?,
                }
            }
            ProfileKind::Table => {
                if gaussian_keys {
                    return Err(invalid("chord: gaussian_* keys are invalid for a table profile"));
                }
                let pos = self
                    .table_position_m
                    .as_ref()
                    .ok_or_else(|| invalid("chord: table profile needs table_position_m"))?;
                let scale = self
                    .table_scale
                    .as_ref()
                    .ok_or_else(|| invalid("chord: table profile needs table_scale"))?;
                if pos.len() != scale.len() {
                    return Err(invalid(format!(
                        "chord: table_position_m has {} entries but table_scale has {}",
                        pos.len(),
                        scale.len()
                    )));
                }
                ChordShape::Table(pos.iter().copied().zip(scale.iter().copied()).collect())
            }
        };
        let mut chord = ChordProfile::new(self.length_m, shape)?;
        if let Some(n) = self.quadrature_points {
            chord = chord.with_quadrature_points(n)?;
        }
        if let Some(s) = self.scale_b0 {
            chord = chord.with_scaled_b0(s);
        }
        Ok(chord)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Single,
    DoubleSymmetric,
    DoubleAntisymmetric,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsSection {
    /// Which circular modes the two interferometer paths carry. Single and
    /// double_symmetric use the probe polarization; double_antisymmetric
    /// sends R one way and L the other.
    pub configuration: PathKind,
}

// ---------------------------------------------------------------------------
// Interferometer
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferometerSection {
    /// Splitter reflectance R in [0, 1].
    pub reflectance: f64,
    /// Pump vacuum wavelength (um).
    pub pump_wavelength_um: f64,
    /// Source pulse width (fs); bandwidth = 2 pi / tau0. Exactly one of
    /// tau0_fs and bandwidth_rad_s must be set.
    pub tau0_fs: Option<f64>,
    /// Source bandwidth (rad/s), alternative to tau0_fs.
    pub bandwidth_rad_s: Option<f64>,
    /// Scan-delay grid start (fs).
    pub delta_tau_start_fs: f64,
    /// Scan-delay grid stop (fs), > start.
    pub delta_tau_stop_fs: f64,
    /// Scan-delay grid size, >= 2.
    pub delta_tau_points: usize,
    /// Static interferometer phase offset (rad), default 0.
    pub phi_0_rad: Option<f64>,
    /// Differential plasma group delay (fs). When omitted it is derived
    /// from [plasma] + [probe] + [chord] (and [paths]) if present, else 0.
    pub delta_tau_p_fs: Option<f64>,
    /// Baseline normalization C, default 1.
    pub normalization: Option<f64>,
    /// Gaussian spectral filter width before detector 1 (rad/s); omitted
    /// means no filter.
    pub filter_sigma_1_rad_s: Option<f64>,
    /// Gaussian spectral filter width before detector 2 (rad/s).
    pub filter_sigma_2_rad_s: Option<f64>,
}

impl InterferometerSection {
    pub fn build(&self) -> Result<InterferometerConfig<f64>, CliError> {
        let pump =
            ProbeWave::<f64>::from_wavelength(self.pump_wavelength_um * UM, Polarization::R)?;
        let mut cfg = match (self.tau0_fs, self.bandwidth_rad_s) {
            (Some(tau0), None) => {
                InterferometerConfig::from_pulse_width(pump.omega, tau0 * FS, self.reflectance)?
            }
            (None, Some(bw)) => InterferometerConfig::new(pump.omega, bw, self.reflectance)?,
            _ => {
                return Err(invalid(
                    "interferometer: set exactly one of tau0_fs and bandwidth_rad_s",
                ))
            }
        };
        if let Some(phi) = self.phi_0_rad {
            cfg = cfg.with_phi_0(phi)?;
        }
        if let Some(c) = self.normalization {
            cfg = cfg.with_normalization(c)?;
        }
        if self.filter_sigma_1_rad_s.is_some() || self.filter_sigma_2_rad_s.is_some() {
            let to_filter = |sigma: Option<f64>| match sigma {
                Some(s) => Filter::Gaussian { sigma: s },
                None => Filter::Unity,
            };
            cfg = cfg.with_filters(
                to_filter(self.filter_sigma_1_rad_s),
                to_filter(self.filter_sigma_2_rad_s),
            )?;
        }
        Ok(cfg)
    }

    /// The scan-delay grid (s), strictly increasing.
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        if self.delta_tau_points < 2 {
            return Err(invalid(format!(
                "interferometer.delta_tau_points must be >= 2, got {}",
                self.delta_tau_points
            )));
        }
        if !(self.delta_tau_start_fs < self.delta_tau_stop_fs) {
            return Err(invalid(format!(
                "interferometer scan grid needs delta_tau_start_fs < delta_tau_stop_fs, \
                 got {} and {}",
                self.delta_tau_start_fs, self.delta_tau_stop_fs
            )));
        }
        let lo = self.delta_tau_start_fs * FS;
        let hi = self.delta_tau_stop_fs * FS;
        let n = self.delta_tau_points;
        Ok((0..n)
            .map(|i| lo + (hi - lo) * (i as f64) / ((n - 1) as f64))
            .collect())
    }
}

// ---------------------------------------------------------------------------
// Linear growth
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearGrowthSection {
    /// Density offset fraction a0, |a0| < 1 (default 0).
    #[serde(default)]
    pub a0: f64,
    /// Growth-rate parameter b, |b| < 2.
    pub b: f64,
    /// Plasma delay of path a at t = 0 (fs).
    pub tau_p_fs: f64,
    /// Plasma delay of path b at t = 0 (fs).
    pub tau_p_prime_fs: f64,
    /// Bandwidth of the growth modulation (rad/s), default 0.
    pub omega_b_rad_s: Option<f64>,
    /// Amplitude prefactor of the growth attenuation, default 1.
    pub b_prefactor: Option<f64>,
    /// Accumulation time t at which the curve is evaluated (fs), default 0.
    #[serde(default)]
    pub accumulation_time_fs: f64,
}

impl LinearGrowthSection {
    pub fn build(&self) -> Result<LinearGrowthModel<f64>, CliError> {
        let mut lg = LinearGrowthModel::new(
            self.a0,
            self.b,
            self.tau_p_fs * FS,
            self.tau_p_prime_fs * FS,
        )?;
        if let Some(w) = self.omega_b_rad_s {
            lg = lg.with_omega_b(w)?;
        }
        if let Some(p) = self.b_prefactor {
            lg = lg.with_b_prefactor(p)?;
        }
        Ok(lg)
    }

    pub fn accumulation_time(&self) -> f64 {
        self.accumulation_time_fs * FS
    }
}

// ---------------------------------------------------------------------------
// Monte Carlo, scaling, sensitivity, fit, outputs
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    /// Signal pairs generated per scan point.
    pub pairs_per_point: u64,
    /// Master RNG seed (the --seed flag overrides it).
    pub seed: u64,
    /// Accumulation span S0 (fs).
    pub accumulation_time_fs: f64,
    /// Full coincidence-window width (fs).
    pub coincidence_width_fs: f64,
    /// Accumulation-span center (fs), default 0.
    pub accumulation_center_fs: Option<f64>,
    /// Accidental coincidence rate (pairs per second of accumulation),
    /// default 0.
    pub accidental_rate_hz: Option<f64>,
    /// Also write the raw detection-time pairs of one batch to this path.
    pub events_out: Option<PathBuf>,
    /// Scan delay at which the event batch is drawn (fs); default is the
    /// differential plasma delay.
    pub events_delta_tau_fs: Option<f64>,
}

impl McSection {
    pub fn window(&self) -> Result<CoincidenceWindow<f64>, CliError> {
        let mut w = CoincidenceWindow::new(
            self.accumulation_time_fs * FS,
            self.coincidence_width_fs * FS,
        )?;
        if let Some(c) = self.accumulation_center_fs {
            w = w.with_center(c * FS)?;
        }
        Ok(w)
    }

    pub fn accidental_rate(&self) -> f64 {
        self.accidental_rate_hz.unwrap_or(0.0)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSection {
    /// Pair budgets per scan point, strictly increasing.
    pub pairs_schedule: Vec<u64>,
    /// Simulate-and-fit trials per budget, >= 20.
    pub trials: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKey {
    /// Shot-noise scaling (eta N)^(-1/2).
    Sql,
    /// Heisenberg scaling (eta N)^(-1).
    Heisenberg,
}

impl From<LawKey> for ScalingLaw {
    fn from(l: LawKey) -> Self {
        match l {
            LawKey::Sql => ScalingLaw::StandardQuantumLimit,
            LawKey::Heisenberg => ScalingLaw::Heisenberg,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivitySection {
    /// Detection efficiency in (0, 1].
    pub eta: f64,
    /// Photon number N.
    pub photon_number: f64,
    /// Scaling law.
    pub law: LawKey,
    /// Prefactor k0, default 1/2.
    pub k0: Option<f64>,
    /// Optional measured/target phase (rad); adds an implied-k0 row.
    pub phase_rad: Option<f64>,
    /// Evaluate at the pump frequency instead of the probe frequency
    /// (default false).
    #[serde(default)]
    pub use_pump_frequency: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    /// Dip-curve CSV to fit (header `delta_tau_s,rc_normalized`).
    pub input: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    /// Default output path; the --out flag overrides it.
    pub out: Option<PathBuf>,
    /// Default output format; the --format flag overrides it.
    pub format: Option<FormatKey>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormatKey {
    Csv,
    Json,
}
