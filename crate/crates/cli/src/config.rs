//! Run configuration: a TOML file with one table per experiment. Every table
//! and key is optional; unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use transmon_core::experiments::{DetuningSettings, GaussianProbe};
use transmon_core::landscape::GoatSettings;
use transmon_core::pulse::REFERENCE_SIGMA_RATIO;
use transmon_core::spectra::{SweepMode, DEFAULT_N_EXP};
use transmon_core::{EnergyParams, SolverConfig, Variant};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: EnergyParams,
    pub models: Vec<Variant>,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub solver: SolverConfig,
    pub spectra: SpectraSection,
    pub rabi: RabiSection,
    pub pi2: Pi2Section,
    pub calibrate: CalibrateSection,
    pub detuning: DetuningSection,
    pub gr3: RabiSection,
    pub landscape: LandscapeSection,
    pub goat: GoatSettings,
    pub ensemble: EnsembleSection,
    pub converge: ConvergeSection,
    pub bench: BenchSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: EnergyParams::REFERENCE,
            models: Variant::HIERARCHY.to_vec(),
            seed: 0,
            output_dir: None,
            solver: SolverConfig::default(),
            spectra: SpectraSection::default(),
            rabi: RabiSection::default(),
            pi2: Pi2Section::default(),
            calibrate: CalibrateSection::default(),
            detuning: DetuningSection::default(),
            gr3: RabiSection::default(),
            landscape: LandscapeSection::default(),
            goat: GoatSettings::default(),
            ensemble: EnsembleSection::default(),
            converge: ConvergeSection::default(),
            bench: BenchSection::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectraSection {
    pub mode: SweepMode,
    pub n_exp: Vec<f64>,
}

impl Default for SpectraSection {
    fn default() -> Self {
        SpectraSection {
            mode: SweepMode::ConstantFreq,
            n_exp: DEFAULT_N_EXP.to_vec(),
        }
    }
}

/// Gaussian amplitude sweep from zero to `amp_max` (GHz).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RabiSection {
    pub duration: f64,
    pub sigma_ratio: f64,
    pub amp_max: f64,
    pub points: usize,
}

impl Default for RabiSection {
    fn default() -> Self {
        RabiSection {
            duration: 142.2,
            sigma_ratio: REFERENCE_SIGMA_RATIO,
            amp_max: 0.075,
            points: 76,
        }
    }
}

impl RabiSection {
    pub fn probe(&self) -> GaussianProbe {
        GaussianProbe {
            duration: self.duration,
            sigma_ratio: self.sigma_ratio,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Pi2Section {
    pub duration: f64,
    pub sigma_ratio: f64,
    /// Grid centre, half width and spacing (GHz).
    pub center: f64,
    pub half_width: f64,
    pub step: f64,
}

impl Default for Pi2Section {
    fn default() -> Self {
        Pi2Section {
            duration: 142.2,
            sigma_ratio: REFERENCE_SIGMA_RATIO,
            center: 3.3e-3,
            half_width: 0.25e-3,
            step: 0.005e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrateSection {
    pub reference: Variant,
    pub target: Variant,
    /// Gaussian probe used to match P₁(t) traces.
    pub amplitude: f64,
    pub duration: f64,
    pub sigma_ratio: f64,
    /// Square-pulse amplitude and half window of the Stark search (GHz).
    pub stark_amplitude: f64,
    pub stark_half_window: f64,
}

impl Default for CalibrateSection {
    fn default() -> Self {
        CalibrateSection {
            reference: Variant::Do3,
            target: Variant::Gr,
            amplitude: 3.38e-3,
            duration: 142.2,
            sigma_ratio: REFERENCE_SIGMA_RATIO,
            stark_amplitude: 0.19,
            stark_half_window: 0.15,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetuningSection {
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_points: usize,
    pub detuning_min: f64,
    pub detuning_max: f64,
    pub detuning_points: usize,
    /// Single E_J/E_C row instead of the full map.
    pub cross_section: Option<f64>,
    pub pulse: DetuningSettings,
}

impl Default for DetuningSection {
    fn default() -> Self {
        DetuningSection {
            ratio_min: 20.0,
            ratio_max: 130.0,
            ratio_points: 40,
            detuning_min: -1.5,
            detuning_max: 0.5,
            detuning_points: 120,
            cross_section: None,
            pulse: DetuningSettings::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LandscapeSection {
    pub reference: Variant,
    pub target: Variant,
    pub sigma_ratio: f64,
    pub amp_max: f64,
    pub amp_points: usize,
    pub time_min: f64,
    pub time_max: f64,
    pub time_points: usize,
}

impl Default for LandscapeSection {
    fn default() -> Self {
        LandscapeSection {
            reference: Variant::Do3,
            target: Variant::Gr,
            sigma_ratio: REFERENCE_SIGMA_RATIO,
            amp_max: 0.075,
            amp_points: 100,
            time_min: 1.422,
            time_max: 142.2,
            time_points: 100,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSection {
    pub size: usize,
    pub relative_sigma: f64,
    /// β = 0 amplitude scan that seeds the optimum search (GHz).
    pub scan_max_amplitude: f64,
    pub scan_points: usize,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        EnsembleSection {
            size: 1000,
            relative_sigma: 0.1,
            scan_max_amplitude: 0.015,
            scan_points: 30,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergeSection {
    pub tol: f64,
}

impl Default for ConvergeSection {
    fn default() -> Self {
        ConvergeSection { tol: 1e-5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub durations: Vec<f64>,
    pub amplitude: f64,
    pub repeats: usize,
}

impl Default for BenchSection {
    fn default() -> Self {
        BenchSection {
            durations: (0..8).map(|k| 10.0 + 20.0 * k as f64).collect(),
            amplitude: 0.075,
            repeats: 3,
        }
    }
}

fn positive(field: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation {
            field,
            reason: format!("must be positive, got {x}"),
        })
    }
}

fn at_least(field: &'static str, n: usize, min: usize) -> Result<()> {
    if n >= min {
        Ok(())
    } else {
        Err(CliError::Validation {
            field,
            reason: format!("must be at least {min}, got {n}"),
        })
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.solver.validate()?;
        if self.models.is_empty() {
            return Err(CliError::Validation {
                field: "models",
                reason: "must name at least one model".into(),
            });
        }
        for n in &self.spectra.n_exp {
            positive("spectra.n_exp", *n)?;
        }
        for (name, r) in [("rabi", &self.rabi), ("gr3", &self.gr3)] {
            positive("duration", r.duration).map_err(|e| e.within(name))?;
            positive("sigma_ratio", r.sigma_ratio).map_err(|e| e.within(name))?;
            positive("amp_max", r.amp_max).map_err(|e| e.within(name))?;
            at_least("points", r.points, 2).map_err(|e| e.within(name))?;
        }
        positive("pi2.duration", self.pi2.duration)?;
        positive("pi2.step", self.pi2.step)?;
        positive("pi2.half_width", self.pi2.half_width)?;
        positive("pi2.sigma_ratio", self.pi2.sigma_ratio)?;
        positive("calibrate.amplitude", self.calibrate.amplitude)?;
        positive("calibrate.duration", self.calibrate.duration)?;
        positive("calibrate.stark_amplitude", self.calibrate.stark_amplitude)?;
        positive("calibrate.stark_half_window", self.calibrate.stark_half_window)?;
        let d = &self.detuning;
        positive("detuning.ratio_min", d.ratio_min)?;
        at_least("detuning.ratio_points", d.ratio_points, 1)?;
        at_least("detuning.detuning_points", d.detuning_points, 2)?;
        positive("detuning.pulse.duration", d.pulse.duration)?;
        positive("detuning.pulse.base_amp", d.pulse.base_amp)?;
        if d.ratio_max < d.ratio_min || d.detuning_max <= d.detuning_min {
            return Err(CliError::Validation {
                field: "detuning",
                reason: "ranges must be increasing".into(),
            });
        }
        let l = &self.landscape;
        positive("landscape.amp_max", l.amp_max)?;
        positive("landscape.time_min", l.time_min)?;
        positive("landscape.time_max", l.time_max)?;
        at_least("landscape.amp_points", l.amp_points, 2)?;
        at_least("landscape.time_points", l.time_points, 2)?;
        self.goat.validate()?;
        at_least("ensemble.size", self.ensemble.size, 1)?;
        positive("ensemble.relative_sigma", self.ensemble.relative_sigma)?;
        positive("ensemble.scan_max_amplitude", self.ensemble.scan_max_amplitude)?;
        positive("converge.tol", self.converge.tol)?;
        at_least("bench.repeats", self.bench.repeats, 1)?;
        at_least("bench.durations", self.bench.durations.len(), 5)?;
        for t in &self.bench.durations {
            positive("bench.durations", *t)?;
        }
        positive("bench.amplitude", self.bench.amplitude)?;
        Ok(())
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
