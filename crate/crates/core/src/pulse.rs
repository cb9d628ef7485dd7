//! Pulse envelopes and drive-signal synthesis.
//!
//! V(t) = Σ_i Ω_i(t) cos(2π ω_i t + γ_i), with the DRAG form
//! Ω(t) cos(2π ω t + γ) − β Ω̇(t) sin(2π ω t + γ).
//! Amplitudes are peak envelope values in GHz, times in ns.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Default Gaussian width as a fraction of the pulse duration.
pub const DEFAULT_SIGMA_RATIO: f64 = 0.25;

/// Width of the 142.2 ns reference Gaussians used by the Rabi, π/2 and
/// truncation experiments. Calibrated so the weak-drive π/2 amplitude of the
/// two-level model is 3.25 MHz.
pub const REFERENCE_SIGMA_RATIO: f64 = 0.271;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Gaussian,
    Square,
    DragGaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    pub shape: Shape,
    /// Peak value of Ω/2π (GHz).
    pub peak_amp: f64,
    /// Duration T (ns).
    pub duration: f64,
    /// DRAG coefficient β (ns); ignored unless `shape` is `DragGaussian`.
    #[serde(default)]
    pub beta: f64,
    /// σ / T of the Gaussian family.
    #[serde(default = "default_sigma_ratio")]
    pub sigma_ratio: f64,
}

fn default_sigma_ratio() -> f64 {
    DEFAULT_SIGMA_RATIO
}

impl Envelope {
    pub fn gaussian(peak_amp: f64, duration: f64) -> Self {
        Envelope {
            shape: Shape::Gaussian,
            peak_amp,
            duration,
            beta: 0.0,
            sigma_ratio: DEFAULT_SIGMA_RATIO,
        }
    }

    pub fn square(peak_amp: f64, duration: f64) -> Self {
        Envelope {
            shape: Shape::Square,
            ..Envelope::gaussian(peak_amp, duration)
        }
    }

    pub fn drag(peak_amp: f64, duration: f64, beta: f64) -> Self {
        Envelope {
            shape: Shape::DragGaussian,
            beta,
            ..Envelope::gaussian(peak_amp, duration)
        }
    }

    pub fn with_sigma_ratio(mut self, ratio: f64) -> Self {
        self.sigma_ratio = ratio;
        self
    }

    pub fn with_amplitude(mut self, amp: f64) -> Self {
        self.peak_amp = amp;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(invalid("duration", format!("must be positive, got {}", self.duration)));
        }
        if !self.peak_amp.is_finite() {
            return Err(invalid("peak_amp", "must be finite"));
        }
        if !(self.sigma_ratio > 0.0) {
            return Err(invalid("sigma_ratio", "must be positive"));
        }
        Ok(())
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(invalid(
                "t",
                format!("{t} ns lies outside [0, {}]", self.duration),
            ));
        }
        Ok(())
    }

    /// Ω(t) for t ∈ [0, T].
    pub fn value(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.value_unchecked(t))
    }

    /// dΩ/dt for t ∈ [0, T].
    pub fn derivative(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.derivative_unchecked(t))
    }

    /// Unit-peak shape s(t), so that Ω(t) = peak_amp · s(t). Zero outside [0, T].
    #[inline]
    pub(crate) fn unit_value(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.duration {
            return 0.0;
        }
        match self.shape {
            Shape::Square => 1.0,
            Shape::Gaussian | Shape::DragGaussian => {
                let (g, g0) = self.gauss(t);
                (g - g0) / (1.0 - g0)
            }
        }
    }

    /// ds/dt of the unit-peak shape.
    #[inline]
    pub(crate) fn unit_derivative(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.duration {
            return 0.0;
        }
        match self.shape {
            Shape::Square => 0.0,
            Shape::Gaussian | Shape::DragGaussian => {
                let sigma = self.sigma_ratio * self.duration;
                let (g, g0) = self.gauss(t);
                -(t - 0.5 * self.duration) / (sigma * sigma) * g / (1.0 - g0)
            }
        }
    }

    #[inline]
    fn gauss(&self, t: f64) -> (f64, f64) {
        let sigma = self.sigma_ratio * self.duration;
        let half = 0.5 * self.duration;
        let two_var = 2.0 * sigma * sigma;
        let x = t - half;
        ((-x * x / two_var).exp(), (-half * half / two_var).exp())
    }

    #[inline]
    pub(crate) fn value_unchecked(&self, t: f64) -> f64 {
        self.peak_amp * self.unit_value(t)
    }

    #[inline]
    pub(crate) fn derivative_unchecked(&self, t: f64) -> f64 {
        self.peak_amp * self.unit_derivative(t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveComponent {
    pub envelope: Envelope,
    /// Carrier frequency ω/2π (GHz).
    pub carrier_freq: f64,
    /// Carrier phase γ (rad).
    #[serde(default)]
    pub phase: f64,
}

impl DriveComponent {
    pub fn new(envelope: Envelope, carrier_freq: f64) -> Self {
        DriveComponent {
            envelope,
            carrier_freq,
            phase: 0.0,
        }
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.envelope.validate()?;
        if !(self.carrier_freq >= 0.0) || !self.carrier_freq.is_finite() {
            return Err(invalid(
                "carrier_freq",
                format!("must be non-negative, got {}", self.carrier_freq),
            ));
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn signal_unchecked(&self, t: f64) -> f64 {
        let (s, c) = (TAU * self.carrier_freq * t + self.phase).sin_cos();
        let env = &self.envelope;
        match env.shape {
            Shape::DragGaussian => {
                env.value_unchecked(t) * c - env.beta * env.derivative_unchecked(t) * s
            }
            _ => env.value_unchecked(t) * c,
        }
    }
}

/// Σ_i of the component signals at time t (ns), in GHz.
pub fn drive_signal(components: &[DriveComponent], t: f64) -> Result<f64> {
    let mut v = 0.0;
    for c in components {
        c.envelope.check_time(t)?;
        v += c.signal_unchecked(t);
    }
    Ok(v)
}

/// A validated set of drive components.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Drive {
    pub components: Vec<DriveComponent>,
}

impl Drive {
    pub fn new(components: Vec<DriveComponent>) -> Result<Self> {
        for c in &components {
            c.validate()?;
        }
        Ok(Drive { components })
    }

    pub fn single(component: DriveComponent) -> Result<Self> {
        Drive::new(vec![component])
    }

    pub fn none() -> Self {
        Drive::default()
    }

    /// Longest component duration.
    pub fn duration(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.envelope.duration)
            .fold(0.0, f64::max)
    }

    /// V(t); components contribute zero outside their own [0, T].
    #[inline]
    pub fn signal(&self, t: f64) -> f64 {
        self.components.iter().map(|c| c.signal_unchecked(t)).sum()
    }

    pub fn is_silent(&self) -> bool {
        self.components.iter().all(|c| c.envelope.peak_amp == 0.0)
    }
}
