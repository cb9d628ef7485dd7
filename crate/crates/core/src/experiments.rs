//! Comparative experiments across the model hierarchy: Rabi amplitude
//! sweeps, π/2 amplitude search, amplitude and Stark calibration, detuned
//! square-pulse infidelity maps and the GR₃ attribution curves.

use std::io::Write;

use log::debug;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{EnergyParams, ModelSpec, Variant};
use crate::propagator::{state_fidelity, Propagator, QuantumState, SolverConfig};
use crate::pulse::{Drive, DriveComponent, Envelope, REFERENCE_SIGMA_RATIO};
use crate::spectra::{match_frequency_anharmonicity, spectral_features, sweep_params, SweepMode};

/// A model variant with its dimensions and energy parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub spec: ModelSpec,
    pub params: EnergyParams,
}

impl Model {
    pub fn new(spec: ModelSpec, params: EnergyParams) -> Self {
        Model { spec, params }
    }

    /// Default dimensions with the reference parameters.
    pub fn reference(variant: Variant) -> Self {
        Model::new(ModelSpec::default_for(variant), EnergyParams::REFERENCE)
    }

    pub fn name(&self) -> &'static str {
        self.spec.variant.name()
    }

    pub fn propagator(&self) -> Result<Propagator> {
        Propagator::build(&self.spec, &self.params)
    }
}

/// Qubit transition frequency of a propagator's dressed frame.
fn omega01(prop: &Propagator) -> f64 {
    prop.transition((0, 0), (1, 0)).expect("ground and first excited labels exist")
}

/// Gaussian pulse shape used by the amplitude sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaussianProbe {
    pub duration: f64,
    pub sigma_ratio: f64,
}

impl Default for GaussianProbe {
    fn default() -> Self {
        GaussianProbe {
            duration: 142.2,
            sigma_ratio: REFERENCE_SIGMA_RATIO,
        }
    }
}

impl GaussianProbe {
    pub fn with_duration(mut self, duration: f64) -> Self {
        self.duration = duration;
        self
    }

    pub fn envelope(&self, amplitude: f64) -> Envelope {
        Envelope::gaussian(amplitude, self.duration).with_sigma_ratio(self.sigma_ratio)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

/// One axis with any number of named value series over it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis_label: String,
    pub axis: Vec<f64>,
    pub series: Vec<Series>,
}

impl SweepResult {
    pub fn new(axis_label: impl Into<String>, axis: Vec<f64>) -> Result<Self> {
        check_strictly_increasing("axis", &axis)?;
        Ok(SweepResult {
            axis_label: axis_label.into(),
            axis,
            series: Vec::new(),
        })
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if values.len() != self.axis.len() {
            return Err(Error::DimensionMismatch {
                expected: self.axis.len(),
                found: values.len(),
            });
        }
        self.series.push(Series {
            name: name.into(),
            values,
        });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.series
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.values.as_slice())
    }

    /// Largest |a − b| between two series.
    pub fn max_abs_difference(&self, a: &str, b: &str) -> Option<f64> {
        let (x, y) = (self.get(a)?, self.get(b)?);
        Some(x.iter().zip(y).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "{}", self.axis_label)?;
        for s in &self.series {
            write!(w, ",{}", s.name)?;
        }
        writeln!(w)?;
        for (i, x) in self.axis.iter().enumerate() {
            write!(w, "{x:.16e}")?;
            for s in &self.series {
                write!(w, ",{:.16e}", s.values[i])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

fn check_strictly_increasing(field: &'static str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(invalid(field, "must not be empty"));
    }
    if xs.iter().any(|x| !x.is_finite()) || xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(field, "must be finite and strictly increasing"));
    }
    Ok(())
}

/// Uniform grid of `n` points on [lo, hi].
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Final dressed |1,0⟩ population after `drive` from the dressed ground state.
pub fn final_excitation(
    prop: &Propagator,
    drive: &Drive,
    duration: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    let s = prop.final_state(drive, &prop.ground_state(), duration, cfg)?;
    s.probability((1, 0))
}

/// Final P₁ per model per peak amplitude (GHz). Each model is driven at its
/// own dressed qubit frequency.
pub fn rabi_amplitude_sweep(
    models: &[Model],
    probe: &GaussianProbe,
    amplitudes: &[f64],
    cfg: &SolverConfig,
) -> Result<SweepResult> {
    let mut result = SweepResult::new("amplitude_ghz", amplitudes.to_vec())?;
    if amplitudes.iter().any(|&a| a < 0.0) {
        return Err(invalid("amplitudes", "must be non-negative"));
    }
    let props: Vec<Propagator> = models.iter().map(Model::propagator).collect::<Result<_>>()?;
    let jobs: Vec<(usize, f64)> = (0..models.len())
        .flat_map(|m| amplitudes.iter().map(move |&a| (m, a)))
        .collect();
    let values: Vec<f64> = jobs
        .par_iter()
        .map(|&(m, a)| {
            let prop = &props[m];
            let drive = Drive::single(DriveComponent::new(probe.envelope(a), omega01(prop)))?;
            final_excitation(prop, &drive, probe.duration, cfg)
        })
        .collect::<Result<_>>()?;
    for (m, model) in models.iter().enumerate() {
        let n = amplitudes.len();
        result.push(model.name(), values[m * n..(m + 1) * n].to_vec())?;
    }
    Ok(result)
}

/// Amplitude grid centred on `center` with the given spacing (GHz).
pub fn pi2_grid(center: f64, half_width: f64, step: f64) -> Vec<f64> {
    let n = (half_width / step).round() as i64;
    (-n..=n).map(|i| center + i as f64 * step).collect()
}

/// Amplitude on `grid` that brings P₁(T) closest to 1/2 along the first
/// monotone rise of P₁ against amplitude.
pub fn optimize_pi2_amplitude(
    model: &Model,
    probe: &GaussianProbe,
    grid: &[f64],
    cfg: &SolverConfig,
) -> Result<f64> {
    let sweep = rabi_amplitude_sweep(std::slice::from_ref(model), probe, grid, cfg)?;
    let p = &sweep.series[0].values;
    let mut end = 0;
    while end + 1 < p.len() && p[end + 1] >= p[end] {
        end += 1;
    }
    if p[..=end].iter().all(|&x| x < 0.5) {
        return Err(Error::NoCrossing);
    }
    let best = (0..=end)
        .min_by(|&i, &j| {
            (p[i] - 0.5)
                .abs()
                .partial_cmp(&(p[j] - 0.5).abs())
                .expect("finite populations")
        })
        .expect("non-empty rise");
    Ok(grid[best])
}

/// Settings for matching P₁(t) traces between two models.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaleSearch {
    pub lower: f64,
    pub upper: f64,
    /// Coarse scan points before golden-section refinement.
    pub scan_points: usize,
    pub tol: f64,
}

impl Default for ScaleSearch {
    fn default() -> Self {
        ScaleSearch {
            lower: 0.5,
            upper: 2.0,
            scan_points: 31,
            tol: 1e-4,
        }
    }
}

fn p1_trace(prop: &Propagator, envelope: Envelope, cfg: &SolverConfig) -> Result<Vec<f64>> {
    let drive = Drive::single(DriveComponent::new(envelope, omega01(prop)))?;
    let rec = prop.evolve(&drive, &prop.ground_state(), envelope.duration, cfg)?;
    rec.populations((1, 0))
}

/// Golden-section minimization of `f` on [a, b] to bracket width `tol`.
pub fn golden_section<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Factor s such that `target` driven with amplitude s·A best reproduces the
/// P₁(t) trace of `reference` driven with amplitude A (least squares over the
/// solver output grid). Each model is driven at its own dressed ω₀₁.
pub fn calibrate_amplitude_scale(
    reference: &Model,
    target: &Model,
    envelope: &Envelope,
    search: &ScaleSearch,
    cfg: &SolverConfig,
) -> Result<f64> {
    envelope.validate()?;
    if !(search.lower > 0.0 && search.upper > search.lower) || search.scan_points < 3 {
        return Err(invalid("search", "need 0 < lower < upper and at least 3 scan points"));
    }
    let p_ref = reference.propagator()?;
    let p_tgt = target.propagator()?;
    let want = p1_trace(&p_ref, *envelope, cfg)?;
    let mismatch = |s: f64| -> Result<f64> {
        let got = p1_trace(&p_tgt, envelope.with_amplitude(s * envelope.peak_amp), cfg)?;
        Ok(got.iter().zip(&want).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / want.len() as f64)
    };
    let grid = linspace(search.lower, search.upper, search.scan_points);
    let costs: Vec<f64> = grid.par_iter().map(|&s| mismatch(s)).collect::<Result<_>>()?;
    let best = costs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite cost"))
        .map(|(i, _)| i)
        .expect("non-empty scan");
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    golden_section(mismatch, lo, hi, search.tol)
}

/// Settings for locating the Stark-shifted qubit frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StarkSearch {
    pub scan_points: usize,
    /// Pulse length in units of the nominal resonant Rabi period.
    pub cycles: f64,
    /// Samples per pulse used to find the peak population.
    pub samples: usize,
}

impl Default for StarkSearch {
    fn default() -> Self {
        StarkSearch {
            scan_points: 31,
            cycles: 1.0,
            samples: 400,
        }
    }
}

/// Vertex abscissa of the parabola through three equally spaced points.
fn parabola_vertex(x: f64, h: f64, y: [f64; 3]) -> f64 {
    let denom = y[0] - 2.0 * y[1] + y[2];
    if denom == 0.0 {
        return x;
    }
    x + 0.5 * h * (y[0] - y[2]) / denom
}

/// Drive frequency (GHz) that maximizes the peak P₁ reached by a square pulse
/// of `amplitude` lasting `cycles` nominal Rabi periods, searched over
/// `window`.
pub fn calibrate_stark_frequency(
    model: &Model,
    amplitude: f64,
    window: (f64, f64),
    search: &StarkSearch,
    cfg: &SolverConfig,
) -> Result<f64> {
    let prop = model.propagator()?;
    stark_frequency_of(&prop, amplitude, window, search, cfg)
}

pub(crate) fn stark_frequency_of(
    prop: &Propagator,
    amplitude: f64,
    window: (f64, f64),
    search: &StarkSearch,
    cfg: &SolverConfig,
) -> Result<f64> {
    if !(amplitude > 0.0) {
        return Err(invalid("amplitude", "must be positive"));
    }
    if !(window.1 > window.0) || search.scan_points < 3 {
        return Err(invalid("window", "need lo < hi and at least 3 scan points"));
    }
    let d01 = prop.drive_element((0, 0), (1, 0))?.norm();
    let duration = search.cycles / (amplitude * d01);
    let sample_cfg = cfg.with_output_points(search.samples.max(2));
    let contrast = |f: f64| -> Result<f64> {
        let drive = Drive::single(DriveComponent::new(Envelope::square(amplitude, duration), f))?;
        let rec = prop.evolve(&drive, &prop.ground_state(), duration, &sample_cfg)?;
        Ok(rec.populations((1, 0))?.into_iter().fold(0.0, f64::max))
    };
    let grid = linspace(window.0, window.1, search.scan_points);
    let values: Vec<f64> = grid.par_iter().map(|&f| contrast(f)).collect::<Result<_>>()?;
    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite contrast"))
        .map(|(i, _)| i)
        .expect("non-empty scan");
    if best == 0 || best == grid.len() - 1 {
        return Err(Error::WindowTooNarrow);
    }
    let h = grid[1] - grid[0];
    let first = parabola_vertex(grid[best], h, [values[best - 1], values[best], values[best + 1]]);
    let h2 = 0.25 * h;
    let y = [contrast(first - h2)?, contrast(first)?, contrast(first + h2)?];
    let refined = parabola_vertex(first, h2, y);
    debug!("stark search: coarse {} refined {refined}", grid[best]);
    Ok(refined.clamp(first - h, first + h))
}

/// Settings of the detuned square-pulse comparison between the Duffing and
/// generalized Rabi models.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetuningSettings {
    /// Square-pulse length (ns).
    pub duration: f64,
    /// Peak amplitude applied to the Duffing model (GHz).
    pub base_amp: f64,
    /// Sample times over the pulse for the maximum infidelity.
    pub sample_times: usize,
    /// Half width of the Stark search window around the dressed ω₀₁ (GHz).
    pub stark_half_window: f64,
    pub stark: StarkSearch,
    pub scale: ScaleSearch,
    /// Tolerance of the spectral match between the two models (GHz).
    pub match_tol: f64,
}

impl Default for DetuningSettings {
    fn default() -> Self {
        DetuningSettings {
            duration: 5.0,
            base_amp: 0.19,
            sample_times: 50,
            stark_half_window: 0.15,
            stark: StarkSearch::default(),
            scale: ScaleSearch::default(),
            match_tol: 1e-6,
        }
    }
}

/// Calibrated Duffing/GR pair for one E_J/E_C value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCalibration {
    pub ratio: f64,
    pub reference: Model,
    pub approx: Model,
    pub omega01: f64,
    pub anharmonicity: f64,
    /// Amplitude factor applied to the GR pulses.
    pub amplitude_scale: f64,
    pub stark_reference: f64,
    pub stark_approx: f64,
}

/// Duffing model at E_J/E_C = `ratio` with E_C held at `base.ec`, and a GR
/// model whose (E_J, E_C) reproduce its dressed ω₀₁ and anharmonicity. The GR
/// amplitude scale and both Stark-shifted frequencies are calibrated at the
/// settings' amplitude.
pub fn calibrate_pair(
    ratio: f64,
    base: &EnergyParams,
    settings: &DetuningSettings,
    cfg: &SolverConfig,
) -> Result<PairCalibration> {
    let do3 = ModelSpec::default_for(Variant::Do3);
    let gr = ModelSpec::default_for(Variant::Gr);
    let p_ref = sweep_params(SweepMode::ConstantAnharm, ratio / base.ratio(), base)?;
    let f = spectral_features(&do3, &p_ref)?;
    let alpha = f
        .anharmonicity
        .ok_or_else(|| invalid("transmon_levels", "need at least 3"))?;
    let ec0 = -alpha;
    let seed = EnergyParams {
        ec: ec0,
        ej: (f.omega01 + ec0).powi(2) / (8.0 * ec0),
        ..p_ref
    };
    let p_gr = match_frequency_anharmonicity(f.omega01, alpha, &gr, &seed, settings.match_tol)?;
    let reference = Model::new(do3, p_ref);
    let approx = Model::new(gr, p_gr);

    let pulse = Envelope::square(settings.base_amp, settings.duration);
    let scale_cfg = cfg.with_output_points(settings.sample_times.max(2));
    let s = calibrate_amplitude_scale(&reference, &approx, &pulse, &settings.scale, &scale_cfg)?;
    let prop_ref = reference.propagator()?;
    let prop_gr = approx.propagator()?;
    let win = |w: f64| (w - settings.stark_half_window, w + settings.stark_half_window);
    let w_ref = omega01(&prop_ref);
    let w_gr = omega01(&prop_gr);
    let stark_reference =
        stark_frequency_of(&prop_ref, settings.base_amp, win(w_ref), &settings.stark, cfg)?;
    let stark_approx =
        stark_frequency_of(&prop_gr, s * settings.base_amp, win(w_gr), &settings.stark, cfg)?;
    Ok(PairCalibration {
        ratio,
        reference,
        approx,
        omega01: f.omega01,
        anharmonicity: alpha,
        amplitude_scale: s,
        stark_reference,
        stark_approx,
    })
}

/// A calibrated pair ready to be driven at arbitrary detunings.
pub struct DetunedPair {
    pub calibration: PairCalibration,
    prop_ref: Propagator,
    prop_approx: Propagator,
    settings: DetuningSettings,
}

impl DetunedPair {
    pub fn new(calibration: PairCalibration, settings: DetuningSettings) -> Result<Self> {
        Ok(DetunedPair {
            prop_ref: calibration.reference.propagator()?,
            prop_approx: calibration.approx.propagator()?,
            calibration,
            settings,
        })
    }

    pub fn reference_propagator(&self) -> &Propagator {
        &self.prop_ref
    }

    fn superposition(prop: &Propagator) -> Result<QuantumState> {
        let w = C64::new(1.0, 0.0);
        QuantumState::superposition(*prop.basis(), &[((0, 0), w), ((1, 0), w)])
    }

    /// Largest 1 − F between the two models over the sample times, starting
    /// from (|0⟩ + |1⟩)/√2. The reference model is driven at ω₀₁ + `detuning`
    /// (GHz); the approximate model's carrier is offset by the difference of
    /// the calibrated Stark-shifted frequencies.
    pub fn max_infidelity(&self, detuning: f64, cfg: &SolverConfig) -> Result<f64> {
        let st = &self.settings;
        let c = &self.calibration;
        let sample_cfg = cfg.with_output_points(st.sample_times.max(2));
        let run = |prop: &Propagator, amp: f64, freq: f64| -> Result<Vec<QuantumState>> {
            let drive =
                Drive::single(DriveComponent::new(Envelope::square(amp, st.duration), freq))?;
            let rec = prop.evolve(&drive, &Self::superposition(prop)?, st.duration, &sample_cfg)?;
            Ok(rec.states)
        };
        let freq = c.omega01 + detuning;
        let a = run(&self.prop_ref, st.base_amp, freq)?;
        let b = run(
            &self.prop_approx,
            c.amplitude_scale * st.base_amp,
            freq + c.stark_approx - c.stark_reference,
        )?;
        let mut worst: f64 = 0.0;
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max(1.0 - state_fidelity(x, y)?);
        }
        Ok(worst)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub calibration: PairCalibration,
    pub detunings: Vec<f64>,
    pub infidelity: Vec<f64>,
}

/// Maximum infidelity against detuning at a single E_J/E_C value.
pub fn detuning_cross_section(
    ratio: f64,
    detunings: &[f64],
    base: &EnergyParams,
    settings: &DetuningSettings,
    cfg: &SolverConfig,
) -> Result<CrossSection> {
    check_strictly_increasing("detunings", detunings)?;
    let cal = calibrate_pair(ratio, base, settings, cfg)?;
    let pair = DetunedPair::new(cal, *settings)?;
    let infidelity = detunings
        .par_iter()
        .map(|&d| pair.max_infidelity(d, cfg))
        .collect::<Result<_>>()?;
    Ok(CrossSection {
        calibration: pair.calibration,
        detunings: detunings.to_vec(),
        infidelity,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapRow {
    pub ratio: f64,
    pub calibration: Option<PairCalibration>,
    /// `None` when the row is masked.
    pub infidelity: Option<Vec<f64>>,
    pub masked: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfidelityMap {
    pub ratios: Vec<f64>,
    pub detunings: Vec<f64>,
    pub rows: Vec<MapRow>,
}

impl InfidelityMap {
    /// Long-format CSV: ratio, detuning, infidelity (empty when masked).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "ej_over_ec,detuning_ghz,max_infidelity")?;
        for row in &self.rows {
            for (j, d) in self.detunings.iter().enumerate() {
                match &row.infidelity {
                    Some(v) => writeln!(w, "{:.16e},{d:.16e},{:.16e}", row.ratio, v[j])?,
                    None => writeln!(w, "{:.16e},{d:.16e},", row.ratio)?,
                }
            }
        }
        Ok(())
    }
}

/// Detuning × E_J/E_C map of the maximum Duffing/GR infidelity. Rows whose
/// dressed labels are ambiguous (qubit near the resonator) are masked.
pub fn detuning_infidelity_map(
    ratios: &[f64],
    detunings: &[f64],
    base: &EnergyParams,
    settings: &DetuningSettings,
    cfg: &SolverConfig,
) -> Result<InfidelityMap> {
    check_strictly_increasing("ratios", ratios)?;
    check_strictly_increasing("detunings", detunings)?;
    let calibrations: Vec<(f64, Result<PairCalibration>)> = ratios
        .par_iter()
        .map(|&r| (r, calibrate_pair(r, base, settings, cfg)))
        .collect();
    let mut rows = Vec::with_capacity(ratios.len());
    for (ratio, cal) in calibrations {
        match cal {
            Ok(cal) => {
                let pair = DetunedPair::new(cal, *settings)?;
                let v = detunings
                    .par_iter()
                    .map(|&d| pair.max_infidelity(d, cfg))
                    .collect::<Result<Vec<f64>>>()?;
                rows.push(MapRow {
                    ratio,
                    calibration: Some(pair.calibration),
                    infidelity: Some(v),
                    masked: None,
                });
            }
            Err(e @ Error::AmbiguousLabel { .. }) => rows.push(MapRow {
                ratio,
                calibration: None,
                infidelity: None,
                masked: Some(e.to_string()),
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(InfidelityMap {
        ratios: ratios.to_vec(),
        detunings: detunings.to_vec(),
        rows,
    })
}

/// P₁ sweeps of GR₃, DO₃ and GR plus Δ^{GR₃}_{DO₃} and Δ^{GR₃}_{GR}.
pub fn gr3_delta_curves(
    params: &EnergyParams,
    probe: &GaussianProbe,
    amplitudes: &[f64],
    cfg: &SolverConfig,
) -> Result<SweepResult> {
    let models: Vec<Model> = [Variant::Gr3, Variant::Do3, Variant::Gr]
        .iter()
        .map(|&v| Model::new(ModelSpec::default_for(v), *params))
        .collect();
    let mut sweep = rabi_amplitude_sweep(&models, probe, amplitudes, cfg)?;
    let delta = |a: &str, b: &str| -> Vec<f64> {
        let (x, y) = (sweep.get(a).expect("swept"), sweep.get(b).expect("swept"));
        x.iter().zip(y).map(|(u, v)| u - v).collect()
    };
    let d_do3 = delta("gr3", "do3");
    let d_gr = delta("gr3", "gr");
    sweep.push("delta_gr3_do3", d_do3)?;
    sweep.push("delta_gr3_gr", d_gr)?;
    Ok(sweep)
}
