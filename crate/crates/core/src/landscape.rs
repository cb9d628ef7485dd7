//! Control landscapes over Gaussian (amplitude × duration) grids, GOAT-style
//! quasi-Newton ascent over DRAG (Ω, β), the R_γ path metric and endpoint
//! statistics of trajectory ensembles.

use std::f64::consts::TAU;
use std::io::Write;

use nalgebra::{Matrix2, SymmetricEigen, Vector2};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::experiments::{final_excitation, GaussianProbe, Model};
use crate::ode;
use crate::propagator::{Propagator, SolverConfig};
use crate::pulse::{Drive, DriveComponent, Envelope};

/// Final dressed |1,0⟩ population over Gaussian pulses of each amplitude
/// (rows) and duration (columns).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapeGrid {
    pub amp_axis: Vec<f64>,
    pub time_axis: Vec<f64>,
    /// `p1[i][j]` belongs to `amp_axis[i]`, `time_axis[j]`.
    pub p1: Vec<Vec<f64>>,
}

impl LandscapeGrid {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write_matrix(&mut w, &self.amp_axis, &self.time_axis, &self.p1, "p1")
    }

    /// Value at the grid point nearest to (amplitude, duration).
    pub fn nearest(&self, amplitude: f64, duration: f64) -> f64 {
        let i = nearest_index(&self.amp_axis, amplitude);
        let j = nearest_index(&self.time_axis, duration);
        self.p1[i][j]
    }
}

fn nearest_index(axis: &[f64], x: f64) -> usize {
    axis.iter()
        .enumerate()
        .min_by(|a, b| (a.1 - x).abs().partial_cmp(&(b.1 - x).abs()).expect("finite axis"))
        .map(|(i, _)| i)
        .expect("non-empty axis")
}

/// Long-format CSV of a matrix over (amplitude, duration).
pub fn write_matrix<W: Write>(
    w: &mut W,
    amp_axis: &[f64],
    time_axis: &[f64],
    values: &[Vec<f64>],
    name: &str,
) -> std::io::Result<()> {
    writeln!(w, "amplitude_ghz,duration_ns,{name}")?;
    for (i, a) in amp_axis.iter().enumerate() {
        for (j, t) in time_axis.iter().enumerate() {
            writeln!(w, "{a:.16e},{t:.16e},{:.16e}", values[i][j])?;
        }
    }
    Ok(())
}

/// Landscape of `model` driven at its dressed ω₀₁ by Gaussians of the probe's
/// width ratio.
pub fn landscape_grid(
    model: &Model,
    probe: &GaussianProbe,
    amp_axis: &[f64],
    time_axis: &[f64],
    cfg: &SolverConfig,
) -> Result<LandscapeGrid> {
    if amp_axis.is_empty() || time_axis.is_empty() {
        return Err(invalid("axes", "must not be empty"));
    }
    if amp_axis.iter().any(|&a| !(a >= 0.0)) {
        return Err(invalid("amp_axis", "must be non-negative"));
    }
    if time_axis.iter().any(|&t| !(t > 0.0)) {
        return Err(invalid("time_axis", "must be positive"));
    }
    let prop = model.propagator()?;
    let w01 = prop.transition((0, 0), (1, 0))?;
    let cells: Vec<(usize, usize)> = (0..amp_axis.len())
        .flat_map(|i| (0..time_axis.len()).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = cells
        .par_iter()
        .map(|&(i, j)| {
            let env = probe.with_duration(time_axis[j]).envelope(amp_axis[i]);
            let drive = Drive::single(DriveComponent::new(env, w01))?;
            final_excitation(&prop, &drive, time_axis[j], cfg)
        })
        .collect::<Result<_>>()?;
    let p1 = values.chunks(time_axis.len()).map(<[f64]>::to_vec).collect();
    Ok(LandscapeGrid {
        amp_axis: amp_axis.to_vec(),
        time_axis: time_axis.to_vec(),
        p1,
    })
}

/// Elementwise |a − b|.
pub fn landscape_diff(a: &LandscapeGrid, b: &LandscapeGrid) -> Result<Vec<Vec<f64>>> {
    if a.amp_axis != b.amp_axis || a.time_axis != b.time_axis {
        return Err(Error::AxisMismatch);
    }
    Ok(a.p1
        .iter()
        .zip(&b.p1)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()).collect())
        .collect())
}

/// DRAG pulse parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlPoint {
    /// Peak amplitude Ω (GHz).
    pub amplitude: f64,
    /// DRAG coefficient β (ns).
    pub beta: f64,
}

impl ControlPoint {
    pub fn new(amplitude: f64, beta: f64) -> Self {
        ControlPoint { amplitude, beta }
    }
}

/// Units that make (Ω, β) dimensionless for distances and steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoordinateScale {
    /// GHz per unit of Ω.
    pub amplitude: f64,
    /// ns per unit of β.
    pub beta: f64,
}

impl Default for CoordinateScale {
    fn default() -> Self {
        CoordinateScale {
            amplitude: 1e-3,
            beta: 1.0,
        }
    }
}

impl CoordinateScale {
    fn to_unitless(&self, p: &ControlPoint) -> Vector2<f64> {
        Vector2::new(p.amplitude / self.amplitude, p.beta / self.beta)
    }

    fn from_unitless(&self, x: &Vector2<f64>) -> ControlPoint {
        ControlPoint::new(x[0] * self.amplitude, x[1] * self.beta)
    }

    fn distance(&self, a: &ControlPoint, b: &ControlPoint) -> f64 {
        (self.to_unitless(a) - self.to_unitless(b)).norm()
    }
}

/// Settings of the DRAG objective and the quasi-Newton ascent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GoatSettings {
    /// DRAG pulse length (ns).
    pub duration: f64,
    /// σ / T of the DRAG Gaussian.
    pub sigma_ratio: f64,
    /// Carrier frequency (GHz); the model's dressed ω₀₁ when absent.
    pub carrier: Option<f64>,
    /// Objective above which a trajectory has converged.
    pub target: f64,
    pub max_steps: usize,
    /// Length of the first step, taken along the gradient, in unitless
    /// coordinates. Later steps follow the BFGS direction with unit trial
    /// length.
    pub initial_step: f64,
    /// Armijo sufficient-increase constant.
    pub armijo: f64,
    /// Halvings tried before a line search gives up.
    pub max_backtracks: usize,
    /// Adoption radius as a fraction of the optimum's unitless norm.
    pub adopt_fraction: f64,
    pub scale: CoordinateScale,
}

impl Default for GoatSettings {
    fn default() -> Self {
        GoatSettings {
            duration: 142.2,
            sigma_ratio: crate::pulse::DEFAULT_SIGMA_RATIO,
            carrier: None,
            target: 1.0 - 5e-5,
            max_steps: 100,
            initial_step: 0.1,
            armijo: 1e-4,
            max_backtracks: 20,
            adopt_fraction: 0.01,
            scale: CoordinateScale::default(),
        }
    }
}

impl GoatSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || !(self.sigma_ratio > 0.0) {
            return Err(invalid("duration", "duration and sigma_ratio must be positive"));
        }
        if !(self.target > 0.0 && self.target < 1.0) {
            return Err(invalid("target", "must lie in (0, 1)"));
        }
        if !(self.initial_step > 0.0) || !(self.armijo > 0.0 && self.armijo < 1.0) {
            return Err(invalid("initial_step", "need a positive step and 0 < armijo < 1"));
        }
        if !(self.scale.amplitude > 0.0 && self.scale.beta > 0.0) {
            return Err(invalid("scale", "units must be positive"));
        }
        Ok(())
    }
}

/// P₁ after a DRAG pulse and its derivatives in Ω (per GHz) and β (per ns).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectiveValue {
    pub p1: f64,
    pub d_amplitude: f64,
    pub d_beta: f64,
}

/// Prepared DRAG objective for one model.
pub struct DragObjective {
    prop: Propagator,
    carrier: f64,
    settings: GoatSettings,
    cfg: SolverConfig,
    target_index: usize,
}

impl DragObjective {
    pub fn new(model: &Model, settings: &GoatSettings, cfg: &SolverConfig) -> Result<Self> {
        settings.validate()?;
        cfg.validate()?;
        let prop = model.propagator()?;
        let carrier = match settings.carrier {
            Some(f) => f,
            None => prop.transition((0, 0), (1, 0))?,
        };
        let target_index = prop.basis().index((1, 0))?;
        Ok(DragObjective {
            prop,
            carrier,
            settings: *settings,
            cfg: *cfg,
            target_index,
        })
    }

    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    pub fn settings(&self) -> &GoatSettings {
        &self.settings
    }

    fn envelope(&self, p: &ControlPoint) -> Envelope {
        Envelope::drag(p.amplitude, self.settings.duration, p.beta)
            .with_sigma_ratio(self.settings.sigma_ratio)
    }

    /// P₁ alone.
    pub fn value(&self, p: &ControlPoint) -> Result<f64> {
        let drive = Drive::single(DriveComponent::new(self.envelope(p), self.carrier))?;
        final_excitation(&self.prop, &drive, self.settings.duration, &self.cfg)
    }

    /// P₁ and its gradient from the state augmented with ∂ψ/∂Ω and ∂ψ/∂β.
    pub fn value_and_gradient(&self, p: &ControlPoint) -> Result<ObjectiveValue> {
        let env = self.envelope(p);
        env.validate()?;
        let n = self.prop.dim();
        let mut y0 = vec![C64::new(0.0, 0.0); 3 * n];
        y0[0] = C64::new(1.0, 0.0);
        let mut rot = vec![C64::new(0.0, 0.0); n];
        let mut unit = vec![C64::new(0.0, 0.0); n];
        let (omega, beta, w) = (p.amplitude, p.beta, self.carrier);
        let rhs = |t: f64, y: &[C64], out: &mut [C64]| {
            let s = env.unit_value(t);
            let ds = env.unit_derivative(t);
            let (sn, cs) = (TAU * w * t).sin_cos();
            let dv_domega = s * cs - beta * ds * sn;
            let dv_dbeta = -omega * ds * sn;
            let v = omega * dv_domega;
            let (c, rest) = y.split_at(n);
            let (c_omega, c_beta) = rest.split_at(n);
            let (o_c, o_rest) = out.split_at_mut(n);
            let (o_omega, o_beta) = o_rest.split_at_mut(n);
            self.prop.apply(1.0, t, c, &mut rot, &mut unit);
            self.prop.apply(v, t, c_omega, &mut rot, o_omega);
            self.prop.apply(v, t, c_beta, &mut rot, o_beta);
            for k in 0..n {
                o_c[k] = unit[k] * v;
                o_omega[k] += unit[k] * dv_domega;
                o_beta[k] += unit[k] * dv_dbeta;
            }
        };
        let d = self.settings.duration;
        let (ys, _) = ode::integrate(rhs, 0.0, d, &y0, &[d], &self.cfg.tolerances())?;
        let y = &ys[0];
        let i = self.target_index;
        let c = y[i];
        Ok(ObjectiveValue {
            p1: c.norm_sqr(),
            d_amplitude: 2.0 * (c.conj() * y[n + i]).re,
            d_beta: 2.0 * (c.conj() * y[2 * n + i]).re,
        })
    }
}

/// One-shot [`DragObjective::value_and_gradient`].
pub fn objective_and_gradient(
    model: &Model,
    point: &ControlPoint,
    settings: &GoatSettings,
    cfg: &SolverConfig,
) -> Result<ObjectiveValue> {
    DragObjective::new(model, settings, cfg)?.value_and_gradient(point)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    /// Step budget exhausted or no increase found by the line search.
    StepLimit,
    AdoptedPath,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<ControlPoint>,
    pub objectives: Vec<f64>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn start(&self) -> &ControlPoint {
        &self.points[0]
    }

    pub fn end(&self) -> &ControlPoint {
        self.points.last().expect("trajectories are non-empty")
    }

    /// CSV: step, Ω, β, P₁.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "step,amplitude_ghz,beta_ns,p1")?;
        for (k, (p, f)) in self.points.iter().zip(&self.objectives).enumerate() {
            writeln!(w, "{k},{:.16e},{:.16e},{f:.16e}", p.amplitude, p.beta)?;
        }
        Ok(())
    }
}

/// Quasi-Newton (BFGS) ascent with Armijo backtracking from `start`, in
/// unitless coordinates. The first step has length `initial_step` along the
/// gradient. A trajectory whose point comes within the adoption radius of one
/// of `known_endpoints` stops with [`Termination::AdoptedPath`].
pub fn goat_optimize(
    objective: &DragObjective,
    start: ControlPoint,
    known_endpoints: &[ControlPoint],
    adopt_radius: f64,
) -> Result<Trajectory> {
    if !(start.amplitude > 0.0) {
        return Err(invalid("start", "amplitude must be positive"));
    }
    let st = objective.settings();
    let scale = st.scale;
    let unitless_gradient = |v: &ObjectiveValue| Vector2::new(v.d_amplitude * scale.amplitude, v.d_beta * scale.beta);
    let mut x = scale.to_unitless(&start);
    let mut f = objective.value_and_gradient(&start)?;
    let mut g = unitless_gradient(&f);
    // Inverse-Hessian estimate of −P₁; `None` until the first curvature pair.
    let mut h: Option<Matrix2<f64>> = None;
    let mut points = vec![start];
    let mut objectives = vec![f.p1];
    let adopted = |p: &ControlPoint| known_endpoints.iter().any(|q| scale.distance(p, q) <= adopt_radius);
    loop {
        if f.p1 > st.target {
            return Ok(Trajectory { points, objectives, termination: Termination::Converged });
        }
        if points.len() > 1 && adopted(points.last().expect("non-empty")) {
            return Ok(Trajectory { points, objectives, termination: Termination::AdoptedPath });
        }
        if points.len() > st.max_steps {
            return Ok(Trajectory { points, objectives, termination: Termination::StepLimit });
        }
        let gn = g.norm();
        if gn == 0.0 {
            return Ok(Trajectory { points, objectives, termination: Termination::StepLimit });
        }
        let mut dir = match h {
            Some(h) => h * g,
            None => g * (st.initial_step / gn),
        };
        if dir.dot(&g) <= 0.0 {
            h = None;
            dir = g * (st.initial_step / gn);
        }
        let slope = dir.dot(&g);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..st.max_backtracks {
            let trial = x + dir * t;
            let p = scale.from_unitless(&trial);
            if p.amplitude > 0.0 {
                let value = objective.value_and_gradient(&p)?;
                if value.p1 > f.p1 && value.p1 >= f.p1 + st.armijo * t * slope {
                    accepted = Some((trial, p, value));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((trial, p, value)) = accepted else {
            return Ok(Trajectory { points, objectives, termination: Termination::StepLimit });
        };
        let g_new = unitless_gradient(&value);
        let s = trial - x;
        let y = g - g_new;
        let sy = s.dot(&y);
        if sy > 0.0 {
            let hk = h.unwrap_or_else(|| Matrix2::identity() * (sy / y.dot(&y)));
            let rho = 1.0 / sy;
            let left = Matrix2::identity() - s * y.transpose() * rho;
            h = Some(left * hk * left.transpose() + s * s.transpose() * rho);
        }
        x = trial;
        f = value;
        g = g_new;
        points.push(p);
        objectives.push(f.p1);
    }
}

/// Path length over endpoint distance in unitless coordinates.
pub fn r_metric(traj: &Trajectory, scale: &CoordinateScale) -> Result<f64> {
    if traj.points.len() < 2 {
        return Err(invalid("trajectory", "needs at least two points"));
    }
    let chord = scale.distance(traj.start(), traj.end());
    if chord == 0.0 {
        return Err(Error::DegenerateTrajectory);
    }
    let length: f64 = traj
        .points
        .windows(2)
        .map(|w| scale.distance(&w[0], &w[1]))
        .sum();
    Ok(length / chord)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSettings {
    pub size: usize,
    pub seed: u64,
    /// Standard deviation of each start coordinate relative to the optimum.
    pub relative_sigma: f64,
}

impl Default for EnsembleSettings {
    fn default() -> Self {
        EnsembleSettings {
            size: 1000,
            seed: 0,
            relative_sigma: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub index: usize,
    pub trajectory: Trajectory,
    /// Started inside the termination region.
    pub started_converged: bool,
    pub r_gamma: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub optimum: ControlPoint,
    pub members: Vec<EnsembleMember>,
    /// Members counted in the statistics.
    pub counted: usize,
    pub r_mean: f64,
    pub r_std: f64,
}

impl EnsembleResult {
    /// Converged or adopted trajectories that did not start converged.
    pub fn counted_members(&self) -> impl Iterator<Item = &EnsembleMember> {
        self.members.iter().filter(|m| m.r_gamma.is_some())
    }

    pub fn fraction_terminated(&self) -> f64 {
        let ok = self
            .members
            .iter()
            .filter(|m| m.trajectory.termination != Termination::StepLimit)
            .count();
        ok as f64 / self.members.len().max(1) as f64
    }
}

/// Start point `index` of a seeded ensemble around `optimum`.
pub fn ensemble_start(optimum: &ControlPoint, settings: &EnsembleSettings, index: usize) -> ControlPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    rng.set_stream(index as u64);
    let n_amp = Normal::new(optimum.amplitude, settings.relative_sigma * optimum.amplitude.abs())
        .expect("finite spread");
    let n_beta =
        Normal::new(optimum.beta, settings.relative_sigma * optimum.beta.abs()).expect("finite spread");
    loop {
        let p = ControlPoint::new(n_amp.sample(&mut rng), n_beta.sample(&mut rng));
        if p.amplitude > 0.0 {
            return p;
        }
    }
}

/// Seeded ensemble of trajectories started around `optimum`. Step-limited
/// trajectories that end within the adoption radius of a converged endpoint
/// are relabelled as adopted; R_γ statistics cover converged and adopted
/// trajectories that did not start converged.
pub fn trajectory_ensemble(
    objective: &DragObjective,
    optimum: &ControlPoint,
    settings: &EnsembleSettings,
) -> Result<EnsembleResult> {
    if settings.size == 0 || !(settings.relative_sigma > 0.0) {
        return Err(invalid("ensemble", "need a positive size and spread"));
    }
    let st = objective.settings();
    let radius = st.adopt_fraction * st.scale.to_unitless(optimum).norm();
    let mut members: Vec<EnsembleMember> = (0..settings.size)
        .into_par_iter()
        .map(|index| {
            let start = ensemble_start(optimum, settings, index);
            let trajectory = goat_optimize(objective, start, &[], radius)?;
            Ok(EnsembleMember {
                index,
                started_converged: trajectory.objectives[0] > st.target,
                trajectory,
                r_gamma: None,
            })
        })
        .collect::<Result<_>>()?;
    let converged: Vec<ControlPoint> = members
        .iter()
        .filter(|m| m.trajectory.termination == Termination::Converged)
        .map(|m| *m.trajectory.end())
        .collect();
    for m in &mut members {
        let t = &mut m.trajectory;
        if t.termination == Termination::StepLimit
            && converged.iter().any(|q| st.scale.distance(t.end(), q) <= radius)
        {
            t.termination = Termination::AdoptedPath;
        }
        if !m.started_converged && t.termination != Termination::StepLimit {
            m.r_gamma = r_metric(t, &st.scale).ok();
        }
    }
    let rs: Vec<f64> = members.iter().filter_map(|m| m.r_gamma).collect();
    let counted = rs.len();
    let (r_mean, r_std) = mean_std(&rs);
    Ok(EnsembleResult {
        optimum: *optimum,
        members,
        counted,
        r_mean,
        r_std,
    })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Locates the DRAG optimum nearest the first Rabi maximum: a β = 0 amplitude
/// scan over (0, `max_amplitude`] followed by quasi-Newton ascent run until the
/// line search stalls.
pub fn locate_optimum(objective: &DragObjective, max_amplitude: f64, scan_points: usize) -> Result<Trajectory> {
    if !(max_amplitude > 0.0) || scan_points < 3 {
        return Err(invalid("max_amplitude", "need a positive range and at least 3 points"));
    }
    let amps: Vec<f64> = (1..=scan_points)
        .map(|k| max_amplitude * k as f64 / scan_points as f64)
        .collect();
    let values: Vec<f64> = amps
        .par_iter()
        .map(|&a| objective.value(&ControlPoint::new(a, 0.0)))
        .collect::<Result<_>>()?;
    let first_peak = (0..values.len())
        .find(|&i| i + 1 == values.len() || values[i + 1] < values[i])
        .expect("non-empty scan");
    let mut st = *objective.settings();
    st.max_steps = st.max_steps.max(200);
    st.target = 1.0 - 1e-13;
    let refine = DragObjective {
        prop: objective.prop.clone(),
        carrier: objective.carrier,
        settings: st,
        cfg: objective.cfg,
        target_index: objective.target_index,
    };
    goat_optimize(&refine, ControlPoint::new(amps[first_peak], 0.0), &[], 0.0)
}

/// Centroid and principal-axis spread of an endpoint cloud, in unitless
/// coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndpointStats {
    pub count: usize,
    pub centroid: ControlPoint,
    /// Unit principal axes (Ω, β components), major axis first.
    pub axes: [[f64; 2]; 2],
    /// Standard deviations along `axes`.
    pub axis_std: [f64; 2],
    /// max − min of the unitless Ω coordinate.
    pub amplitude_extent: f64,
    /// max − min of the unitless β coordinate.
    pub beta_extent: f64,
}

pub const MIN_ENDPOINTS: usize = 10;

pub fn endpoint_stats(trajs: &[Trajectory], scale: &CoordinateScale) -> Result<EndpointStats> {
    let pts: Vec<Vector2<f64>> = trajs
        .iter()
        .filter(|t| t.termination != Termination::StepLimit)
        .map(|t| scale.to_unitless(t.end()))
        .collect();
    if pts.len() < MIN_ENDPOINTS {
        return Err(Error::InsufficientEndpoints {
            needed: MIN_ENDPOINTS,
            found: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mean = pts.iter().sum::<Vector2<f64>>() / n;
    let cov = pts
        .iter()
        .map(|p| (p - mean) * (p - mean).transpose())
        .sum::<Matrix2<f64>>()
        / n;
    let eig = SymmetricEigen::new(cov);
    let (major, minor) = if eig.eigenvalues[0] >= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let axis = |k: usize| [eig.eigenvectors[(0, k)], eig.eigenvectors[(1, k)]];
    let extent = |c: usize| {
        let (lo, hi) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[c]), hi.max(p[c])));
        hi - lo
    };
    Ok(EndpointStats {
        count: pts.len(),
        centroid: scale.from_unitless(&mean),
        axes: [axis(major), axis(minor)],
        axis_std: [
            eig.eigenvalues[major].max(0.0).sqrt(),
            eig.eigenvalues[minor].max(0.0).sqrt(),
        ],
        amplitude_extent: extent(0),
        beta_extent: extent(1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Variant;

    fn traj(points: &[(f64, f64)]) -> Trajectory {
        Trajectory {
            points: points.iter().map(|&(a, b)| ControlPoint::new(a, b)).collect(),
            objectives: vec![0.0; points.len()],
            termination: Termination::Converged,
        }
    }

    #[test]
    fn r_metric_examples() {
        let s = CoordinateScale { amplitude: 1.0, beta: 1.0 };
        assert_eq!(r_metric(&traj(&[(0.0, 0.0), (1.0, 1.0)]), &s).unwrap(), 1.0);
        let r = r_metric(&traj(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]), &s).unwrap();
        assert!((r - 2.0f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            r_metric(&traj(&[(1.0, 0.0), (2.0, 0.0), (1.0, 0.0)]), &s),
            Err(Error::DegenerateTrajectory)
        ));
    }

    #[test]
    fn r_metric_is_scale_invariant() {
        let t = traj(&[(0.01, 0.1), (0.012, 0.3), (0.02, 0.25)]);
        let a = CoordinateScale::default();
        let b = CoordinateScale { amplitude: 2e-3, beta: 2.0 };
        assert!((r_metric(&t, &a).unwrap() - r_metric(&t, &b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn identical_endpoints_have_zero_extent() {
        let ts: Vec<Trajectory> = (0..12).map(|_| traj(&[(0.01, 0.0), (0.02, 0.3)])).collect();
        let st = endpoint_stats(&ts, &CoordinateScale::default()).unwrap();
        assert_eq!(st.amplitude_extent, 0.0);
        assert_eq!(st.beta_extent, 0.0);
        assert!(st.axis_std.iter().all(|s| s.abs() < 1e-12));
        assert!((st.centroid.amplitude - 0.02).abs() < 1e-15);
        let few = &ts[..3];
        assert!(matches!(
            endpoint_stats(few, &CoordinateScale::default()),
            Err(Error::InsufficientEndpoints { .. })
        ));
    }

    #[test]
    fn landscape_zero_amplitude_row_and_diff() {
        let m = Model::reference(Variant::R);
        let probe = GaussianProbe::default();
        let cfg = SolverConfig::default();
        let g = landscape_grid(&m, &probe, &[0.0, 0.01], &[10.0, 20.0], &cfg).unwrap();
        assert_eq!(g.p1[0], vec![0.0, 0.0]);
        let d = landscape_diff(&g, &g).unwrap();
        assert!(d.iter().flatten().all(|&x| x == 0.0));
        let mut h = g.clone();
        h.time_axis[1] = 30.0;
        assert!(matches!(landscape_diff(&g, &h), Err(Error::AxisMismatch)));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let cfg = SolverConfig::default().with_rel_tol(1e-10).with_abs_tol(1e-12);
        let st = GoatSettings {
            duration: 20.0,
            ..Default::default()
        };
        for v in [Variant::Do3, Variant::R] {
            let obj = DragObjective::new(&Model::reference(v), &st, &cfg).unwrap();
            let p = ControlPoint::new(0.021, 0.15);
            let g = obj.value_and_gradient(&p).unwrap();
            assert!((g.p1 - obj.value(&p).unwrap()).abs() < 1e-8);
            let h = 1e-5;
            let fd_a = (obj.value(&ControlPoint::new(p.amplitude + h * 1e-3, p.beta)).unwrap()
                - obj.value(&ControlPoint::new(p.amplitude - h * 1e-3, p.beta)).unwrap())
                / (2.0 * h * 1e-3);
            let fd_b = (obj.value(&ControlPoint::new(p.amplitude, p.beta + h)).unwrap()
                - obj.value(&ControlPoint::new(p.amplitude, p.beta - h)).unwrap())
                / (2.0 * h);
            assert!(((g.d_amplitude - fd_a) / fd_a).abs() < 1e-3, "{v:?}: {} vs {fd_a}", g.d_amplitude);
            assert!(((g.d_beta - fd_b) / fd_b).abs() < 1e-3, "{v:?}: {} vs {fd_b}", g.d_beta);
        }
    }

    #[test]
    fn ensemble_starts_are_seeded() {
        let opt = ControlPoint::new(0.025, 0.2);
        let st = EnsembleSettings { size: 10, seed: 7, relative_sigma: 0.1 };
        let a: Vec<ControlPoint> = (0..5).map(|i| ensemble_start(&opt, &st, i)).collect();
        let b: Vec<ControlPoint> = (0..5).map(|i| ensemble_start(&opt, &st, i)).collect();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn ascent_converges_and_restarts_at_endpoint() {
        let st = GoatSettings {
            duration: 20.0,
            ..Default::default()
        };
        let obj = DragObjective::new(&Model::reference(Variant::R), &st, &SolverConfig::default()).unwrap();
        let t = goat_optimize(&obj, ControlPoint::new(0.045, 0.0), &[], 0.0).unwrap();
        assert_eq!(t.termination, Termination::Converged);
        assert!(t.points.len() <= 10, "{} steps", t.points.len());
        assert!(t.objectives.windows(2).all(|w| w[1] > w[0]));
        assert!(r_metric(&t, &st.scale).unwrap() >= 1.0);
        let again = goat_optimize(&obj, *t.end(), &[], 0.0).unwrap();
        assert_eq!(again.termination, Termination::Converged);
        assert_eq!(again.points.len(), 1);
    }
}
