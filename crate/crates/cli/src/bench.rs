//! Wall-time scaling of Gaussian-pulse evolutions with pulse duration.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use transmon_core::experiments::{GaussianProbe, Model};
use transmon_core::{Drive, DriveComponent, EnergyParams, Error, ModelSpec, SolverConfig, Variant};

use crate::error::Result;

pub const MIN_TICKS: u64 = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelTiming {
    pub model: Variant,
    pub transmon_levels: usize,
    /// (duration ns, fastest wall seconds).
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// CPB slope over this model's slope.
    pub speedup: Option<f64>,
    /// Wall times over the CPB's longest-duration sample.
    pub normalized: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub amplitude: f64,
    pub repeats: usize,
    pub timer_tick_ns: u64,
    pub models: Vec<ModelTiming>,
}

impl BenchReport {
    pub fn get(&self, model: Variant) -> Option<&ModelTiming> {
        self.models.iter().find(|m| m.model == model)
    }
}

/// Least-squares line through (x, y): (slope, intercept, R²).
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

/// Smallest non-zero difference between consecutive clock readings.
fn timer_tick() -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..1000 {
        let a = Instant::now();
        let mut b = Instant::now();
        while b == a {
            b = Instant::now();
        }
        best = best.min(b - a);
    }
    best
}

/// Fastest-of-`repeats` wall time of one resonant Gaussian evolution per model
/// and duration, run serially on the calling thread. Models are interleaved
/// within each repeat so slow drifts in machine load affect them alike.
pub fn runtime_bench(
    models: &[Variant],
    params: &EnergyParams,
    durations: &[f64],
    amplitude: f64,
    repeats: usize,
    cfg: &SolverConfig,
) -> Result<BenchReport> {
    let tick = timer_tick();
    let probe = GaussianProbe::default();
    let mut setups = Vec::with_capacity(models.len());
    for &variant in models {
        let model = Model::new(ModelSpec::default_for(variant), *params);
        let prop = model.propagator()?;
        let w01 = prop.transition((0, 0), (1, 0))?;
        setups.push((model, prop, w01));
    }
    let mut best = vec![vec![f64::INFINITY; durations.len()]; models.len()];
    for (j, &t) in durations.iter().enumerate() {
        for _ in 0..repeats.max(1) {
            for (i, (_, prop, w01)) in setups.iter().enumerate() {
                let drive = Drive::single(DriveComponent::new(
                    probe.with_duration(t).envelope(amplitude),
                    *w01,
                ))?;
                let start = Instant::now();
                prop.final_state(&drive, &prop.ground_state(), t, cfg)?;
                let wall = start.elapsed();
                let ticks = (wall.as_nanos() / tick.as_nanos().max(1)) as u64;
                if ticks < MIN_TICKS {
                    return Err(Error::TimerResolution { ticks }.into());
                }
                best[i][j] = best[i][j].min(wall.as_secs_f64());
            }
        }
    }
    let mut timings = Vec::with_capacity(models.len());
    for ((model, _, _), walls) in setups.iter().zip(&best) {
        let samples: Vec<(f64, f64)> = durations.iter().copied().zip(walls.iter().copied()).collect();
        let (slope, intercept, r_squared) = linear_fit(&samples);
        timings.push(ModelTiming {
            model: model.spec.variant,
            transmon_levels: model.spec.transmon_levels,
            samples,
            slope,
            intercept,
            r_squared,
            speedup: None,
            normalized: None,
        });
    }
    if let Some(cpb) = timings.iter().find(|m| m.model == Variant::Cpb).cloned() {
        let reference = cpb.samples.last().map(|s| s.1).unwrap_or(1.0);
        for m in &mut timings {
            m.speedup = Some(cpb.slope / m.slope);
            m.normalized = Some(m.samples.iter().map(|s| s.1 / reference).collect());
        }
    }
    Ok(BenchReport {
        amplitude,
        repeats,
        timer_tick_ns: tick.as_nanos() as u64,
        models: timings,
    })
}
