//! Acceptance run over the full model hierarchy. Prints one line per
//! criterion with the measured values and the pinned tolerances, then fails
//! if any criterion outside `KNOWN_UNATTAINABLE` fails. Numeric arguments
//! restrict the run to those criteria.

use std::process::ExitCode;
use std::time::Instant;

use transmon_cli::bench::runtime_bench;
use transmon_core::experiments::{
    calibrate_pair, gr3_delta_curves, linspace, optimize_pi2_amplitude, pi2_grid, rabi_amplitude_sweep,
    DetunedPair, DetuningSettings, GaussianProbe, Model,
};
use transmon_core::landscape::{
    endpoint_stats, landscape_diff, landscape_grid, locate_optimum, r_metric, trajectory_ensemble,
    ControlPoint, CoordinateScale, DragObjective, EndpointStats, EnsembleSettings, GoatSettings, Termination,
    Trajectory,
};
use transmon_core::model::{build_gr, couple_with_resonator};
use transmon_core::propagator::{convergence_scan, probe_pulse};
use transmon_core::spectra::{
    ejc_sweep, eigenvalues, invert_closed_form, refine_parameters, spectral_features, transition_frequencies, Measurements, SweepMode,
    DEFAULT_N_EXP,
};
use transmon_core::system::System;
use transmon_core::{
    Drive, DriveComponent, EnergyParams, Envelope, ModelSpec, Propagator, SolverConfig, Variant,
};

const REFERENCE: EnergyParams = EnergyParams::REFERENCE;

/// Criteria whose failure is documented as a property of the model rather
/// than of the implementation.
const KNOWN_UNATTAINABLE: &[u32] = &[6, 7, 9, 10];

// Criterion 1
const OMEGA_GAP_MIN: f64 = 15e-3;
const ALPHA_GAP_MIN: f64 = 50e-3;
// Criterion 2
const GR_OMEGA01: f64 = 4.9699;
const CLOSED_FORM_TOL: f64 = 1e-9;
// Criterion 3
const CPB_DO3_MAX: f64 = 0.02;
const DO3_GR_MIN: f64 = 0.2;
// Criterion 4
const PI2_CPB_DO3: f64 = 3.38e-3;
const PI2_GR_R: f64 = 3.25e-3;
const PI2_TOL: f64 = 0.05e-3;
// Criterion 5
const GR3_RATIO_MIN: f64 = 5.0;
// Criterion 6
const DETUNING_RATIO: f64 = 100.0;
const ZERO_DETUNING_MAX: f64 = 0.01;
const TWO_PHOTON_MIN: f64 = 0.5;
const SCAN_STEP: f64 = 0.01;
const PEAK_FLOOR: f64 = 0.05;
// Criterion 7
const LANDSCAPE_MAX_MIN: f64 = 0.7;
const LANDSCAPE_PROBE_MAX: f64 = 0.1;
const LANDSCAPE_POINTS: usize = 26;
// Criterion 8
const CONVERGENCE_TOL: f64 = 1e-5;
// Criterion 9
const ENSEMBLE_SIZE: usize = 100;
const R_TARGETS: [(Variant, f64); 4] = [
    (Variant::Cpb, 1.185),
    (Variant::Do3, 1.190),
    (Variant::Gr, 1.188),
    (Variant::R, 1.167),
];
const R_STD_TARGET: f64 = 0.17;
const R_BAND: f64 = 0.08;
const R_SPREAD_MAX: f64 = 0.05;
// Criterion 11
const NORM_TOL: f64 = 1e-6;
const GRADIENT_TOL: f64 = 1e-3;
const INVERSION_TOL: f64 = 1e-3;
const LADDER_TOL: f64 = 0.1;
// Criterion 12
const GR_SPEEDUP_MIN: f64 = 2.0;
const R_SPEEDUP_MIN: f64 = 6.0;
const BENCH_REPEATS: usize = 5;

struct Outcome {
    id: u32,
    title: &'static str,
    passed: bool,
    detail: String,
    seconds: f64,
}

fn solver() -> SolverConfig {
    SolverConfig::default()
}

fn reference_probe() -> GaussianProbe {
    GaussianProbe::default()
}

fn model(v: Variant) -> Model {
    Model::reference(v)
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn spectral_deviation() -> (bool, String) {
    let specs = [ModelSpec::default_for(Variant::Cpb), ModelSpec::default_for(Variant::Gr)];
    let rows = ejc_sweep(SweepMode::ConstantFreq, &DEFAULT_N_EXP, &REFERENCE, &specs).expect("sweep");
    let gaps: Vec<(f64, f64)> = DEFAULT_N_EXP
        .iter()
        .map(|&n| {
            let at = |v: Variant| rows.iter().find(|r| r.n_exp == n && r.model == v).expect("row");
            let (c, g) = (at(Variant::Cpb), at(Variant::Gr));
            (
                (c.omega01 - g.omega01).abs(),
                (c.anharmonicity.expect("cpb α") - g.anharmonicity.expect("gr α")).abs(),
            )
        })
        .collect();
    let shrinking = gaps.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1);
    let (w0, a0) = gaps[0];
    let (wn, an) = gaps[gaps.len() - 1];
    (
        w0 > OMEGA_GAP_MIN && a0 > ALPHA_GAP_MIN && shrinking,
        format!(
            "n_exp=1: |Δω01| {:.2} MHz (> {:.0}), |Δα| {:.2} MHz (> {:.0}); n_exp=64: {:.2}, {:.2} MHz; monotone {shrinking}",
            w0 * 1e3,
            OMEGA_GAP_MIN * 1e3,
            a0 * 1e3,
            ALPHA_GAP_MIN * 1e3,
            wn * 1e3,
            an * 1e3
        ),
    )
}

fn gr_closed_forms() -> (bool, String) {
    let f = spectral_features(&ModelSpec::default_for(Variant::Gr), &REFERENCE.with_g(0.0)).expect("features");
    let omega = (8.0 * REFERENCE.ec * REFERENCE.ej).sqrt() - REFERENCE.ec;
    let alpha = f.anharmonicity.expect("gr α");
    let ok = (f.omega01 - omega).abs() < CLOSED_FORM_TOL
        && (f.omega01 - GR_OMEGA01).abs() < 5e-5
        && (alpha + REFERENCE.ec).abs() < CLOSED_FORM_TOL;
    (
        ok,
        format!(
            "ω01 {:.10} GHz (closed form {:.10}), α {:.10} GHz (−E_C = {:.3}), tol {CLOSED_FORM_TOL:e}",
            f.omega01, omega, alpha, -REFERENCE.ec
        ),
    )
}

fn rabi_divergence() -> (bool, String) {
    let amps = linspace(0.0, 0.075, 76);
    let models: Vec<Model> = [Variant::Cpb, Variant::Do3, Variant::Gr].map(model).to_vec();
    let sweep = rabi_amplitude_sweep(&models, &reference_probe(), &amps, &solver()).expect("sweep");
    let cd = sweep.max_abs_difference("cpb", "do3").expect("series");
    let dg = sweep.max_abs_difference("do3", "gr").expect("series");
    (
        cd < CPB_DO3_MAX && dg > DO3_GR_MIN,
        format!("max|P1 CPB−DO3| {cd:.4} (< {CPB_DO3_MAX}), max|P1 DO3−GR| {dg:.4} (> {DO3_GR_MIN})"),
    )
}

fn pi2_amplitudes() -> (bool, String) {
    let grid = pi2_grid(3.3e-3, 0.25e-3, 0.005e-3);
    let mut ok = true;
    let mut parts = Vec::new();
    for (v, target) in [
        (Variant::Cpb, PI2_CPB_DO3),
        (Variant::Do3, PI2_CPB_DO3),
        (Variant::Gr, PI2_GR_R),
        (Variant::R, PI2_GR_R),
    ] {
        let a = optimize_pi2_amplitude(&model(v), &reference_probe(), &grid, &solver()).expect("π/2 search");
        ok &= (a - target).abs() <= PI2_TOL + 1e-12;
        parts.push(format!("{v} {:.3} MHz (target {:.2})", a * 1e3, target * 1e3));
    }
    (ok, format!("{} ± {:.2} MHz", parts.join(", "), PI2_TOL * 1e3))
}

fn gr3_attribution() -> (bool, String) {
    let amps = linspace(0.0, 0.075, 76);
    let sweep = gr3_delta_curves(&REFERENCE, &reference_probe(), &amps, &solver()).expect("sweep");
    let d_do3 = max_abs(sweep.get("delta_gr3_do3").expect("series"));
    let d_gr = max_abs(sweep.get("delta_gr3_gr").expect("series"));
    (
        d_do3 >= GR3_RATIO_MIN * d_gr,
        format!(
            "max|Δ GR3,DO3| {d_do3:.4}, max|Δ GR3,GR| {d_gr:.4}, ratio {:.1} (≥ {GR3_RATIO_MIN})",
            d_do3 / d_gr
        ),
    )
}

fn local_peaks(xs: &[f64], ys: &[f64], floor: f64) -> Vec<(f64, f64)> {
    (1..ys.len() - 1)
        .filter(|&i| ys[i] > floor && ys[i] >= ys[i - 1] && ys[i] > ys[i + 1])
        .map(|i| (xs[i], ys[i]))
        .collect()
}

fn detuned_cross_section() -> (bool, String) {
    let settings = DetuningSettings::default();
    let cfg = solver();
    let cal = calibrate_pair(DETUNING_RATIO, &REFERENCE, &settings, &cfg).expect("calibration");
    let transitions =
        transition_frequencies(&cal.reference.spec, &cal.reference.params, 3).expect("transitions");
    let lines: Vec<(String, f64)> = transitions
        .iter()
        .map(|t| (format!("{}→{}×{}", t.from, t.to, t.photons), t.frequency - cal.omega01))
        .collect();
    let two_photon_13 = transitions
        .iter()
        .find(|t| t.from == 1 && t.to == 3 && t.photons == 2)
        .map(|t| t.frequency - cal.omega01)
        .expect("1→3 line");
    let pair = DetunedPair::new(cal, settings).expect("pair");
    let at_zero = pair.max_infidelity(0.0, &cfg).expect("zero detuning");
    let at_13 = pair.max_infidelity(two_photon_13, &cfg).expect("two-photon detuning");
    let scan = linspace(-1.0, 0.3, 131);
    let values: Vec<f64> = scan.iter().map(|&d| pair.max_infidelity(d, &cfg).expect("scan")).collect();
    let peaks = local_peaks(&scan, &values, PEAK_FLOOR);
    let near = |a: f64, b: f64| (a - b).abs() <= 1.5 * SCAN_STEP;
    let active: Vec<&(String, f64)> = lines
        .iter()
        .filter(|(_, x)| {
            scan.iter()
                .zip(&values)
                .min_by(|a, b| (a.0 - x).abs().partial_cmp(&(b.0 - x).abs()).expect("finite"))
                .is_some_and(|(d, v)| (d - x).abs() <= SCAN_STEP && *v > PEAK_FLOOR)
        })
        .collect();
    let missing: Vec<String> = active
        .iter()
        .filter(|(_, x)| !peaks.iter().any(|(d, _)| near(*d, *x)))
        .map(|(name, x)| format!("{name}@{x:.3}"))
        .collect();
    let aligned = missing.is_empty() && !active.is_empty();
    let described: Vec<String> = peaks
        .iter()
        .map(|(d, v)| match lines.iter().find(|(_, x)| near(*d, *x)) {
            Some((name, _)) => format!("{d:.2} GHz {v:.2} [{name}]"),
            None => format!("{d:.2} GHz {v:.2} [no line]"),
        })
        .collect();
    (
        at_zero < ZERO_DETUNING_MAX && at_13 > TWO_PHOTON_MIN && aligned,
        format!(
            "zero detuning {:.4} (< {ZERO_DETUNING_MAX}); 1→3 two-photon at {two_photon_13:.3} GHz: {at_13:.3} (> {TWO_PHOTON_MIN}); lines above {PEAK_FLOOR} with a peak: {}/{} aligned {aligned}{}; peaks {}",
            at_zero,
            active.len() - missing.len(),
            active.len(),
            if missing.is_empty() { String::new() } else { format!(" missing {}", missing.join(" ")) },
            described.join(", ")
        ),
    )
}

fn landscape_deviation() -> (bool, String) {
    let probe = reference_probe();
    let amps = linspace(0.0, 0.075, LANDSCAPE_POINTS);
    let times = linspace(1.422, 142.2, LANDSCAPE_POINTS);
    let cfg = solver();
    let a = landscape_grid(&model(Variant::Do3), &probe, &amps, &times, &cfg).expect("grid");
    let b = landscape_grid(&model(Variant::Gr), &probe, &amps, &times, &cfg).expect("grid");
    let diff = landscape_diff(&a, &b).expect("axes");
    let max = diff.iter().flatten().fold(0.0f64, |m, &x| m.max(x));
    let point = |v: Variant| {
        landscape_grid(&model(v), &probe, &[PI2_CPB_DO3], &[142.2], &cfg).expect("point").p1[0][0]
    };
    let at_probe = (point(Variant::Do3) - point(Variant::Gr)).abs();
    (
        max > LANDSCAPE_MAX_MIN && at_probe < LANDSCAPE_PROBE_MAX,
        format!(
            "{LANDSCAPE_POINTS}×{LANDSCAPE_POINTS} grid: max|P1 DO3−GR| {max:.3} (> {LANDSCAPE_MAX_MIN}); at (3.38 MHz, 142.2 ns) {at_probe:.4} (< {LANDSCAPE_PROBE_MAX})"
        ),
    )
}

fn convergence_dims() -> (bool, String) {
    let dims: Vec<(Variant, usize)> = Variant::HIERARCHY
        .iter()
        .map(|&v| {
            let spec = ModelSpec::default_for(v);
            let w01 = Propagator::build(&spec, &REFERENCE)
                .and_then(|p| p.transition((0, 0), (1, 0)))
                .expect("ω01");
            let scan = convergence_scan(&spec, &REFERENCE, &probe_pulse(w01), CONVERGENCE_TOL, &solver()).expect("scan");
            (v, scan.dimension)
        })
        .collect();
    let get = |v: Variant| dims.iter().find(|d| d.0 == v).expect("dim").1;
    let (c, d, g, r) = (get(Variant::Cpb), get(Variant::Do3), get(Variant::Gr), get(Variant::R));
    let ok = c.abs_diff(13) <= 2 && d.abs_diff(12) <= 2 && g.abs_diff(6) <= 1 && r == 2 && c >= d && d > g;
    (
        ok,
        format!("CPB {c} (13±2), DO3 {d} (12±2), GR {g} (6±1), R {r} (2); CPB ≥ DO3 > GR {}", c >= d && d > g),
    )
}

struct EnsembleRun {
    model: Variant,
    r_mean: f64,
    r_std: f64,
    counted: usize,
    terminated: f64,
    endpoints: Option<EndpointStats>,
}

fn run_ensembles() -> Vec<EnsembleRun> {
    let settings = GoatSettings::default();
    let cfg = solver();
    Variant::HIERARCHY
        .iter()
        .map(|&v| {
            let objective = DragObjective::new(&model(v), &settings, &cfg).expect("objective");
            let optimum = *locate_optimum(&objective, 0.015, 30).expect("optimum").end();
            let ens = trajectory_ensemble(
                &objective,
                &optimum,
                &EnsembleSettings {
                    size: ENSEMBLE_SIZE,
                    seed: 0,
                    relative_sigma: 0.1,
                },
            )
            .expect("ensemble");
            let trajs: Vec<Trajectory> = ens.counted_members().map(|m| m.trajectory.clone()).collect();
            EnsembleRun {
                model: v,
                r_mean: ens.r_mean,
                r_std: ens.r_std,
                counted: ens.counted,
                terminated: ens.fraction_terminated(),
                endpoints: endpoint_stats(&trajs, &settings.scale).ok(),
            }
        })
        .collect()
}

fn ensemble_statistics(runs: &[EnsembleRun]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (v, target) in R_TARGETS {
        let run = runs.iter().find(|r| r.model == v).expect("run");
        let pass = (run.r_mean - target).abs() <= R_BAND && (run.r_std - R_STD_TARGET).abs() <= R_BAND;
        ok &= pass;
        parts.push(format!(
            "{v} {:.3}±{:.3} (target {target}±{R_STD_TARGET}, n={}, terminated {:.0}%)",
            run.r_mean,
            run.r_std,
            run.counted,
            run.terminated * 100.0
        ));
    }
    let means: Vec<f64> = runs.iter().map(|r| r.r_mean).collect();
    let spread = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - means.iter().cloned().fold(f64::INFINITY, f64::min);
    ok &= spread < R_SPREAD_MAX;
    (
        ok,
        format!("{}; spread {spread:.3} (< {R_SPREAD_MAX}); bands ±{R_BAND}", parts.join(", ")),
    )
}

fn endpoint_geometry(runs: &[EnsembleRun]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for run in runs {
        match &run.endpoints {
            Some(s) => {
                ok &= s.beta_extent > s.amplitude_extent;
                parts.push(format!(
                    "{} β-extent {:.4} vs Ω-extent {:.4}",
                    run.model, s.beta_extent, s.amplitude_extent
                ));
            }
            None => {
                ok = false;
                parts.push(format!("{} too few endpoints", run.model));
            }
        }
    }
    let centroid = |v: Variant| {
        runs.iter()
            .find(|r| r.model == v)
            .and_then(|r| r.endpoints.as_ref())
            .map(|s| s.centroid)
    };
    let scale = CoordinateScale::default();
    let dist = |a: ControlPoint, b: ControlPoint| {
        ((a.amplitude - b.amplitude) / scale.amplitude).hypot((a.beta - b.beta) / scale.beta)
    };
    if let (Some(c), Some(d), Some(g)) = (centroid(Variant::Cpb), centroid(Variant::Do3), centroid(Variant::Gr)) {
        let (cd, cg, dg) = (dist(c, d), dist(c, g), dist(d, g));
        ok &= cd < cg && cd < dg;
        parts.push(format!("centroids |CPB−DO3| {cd:.4} vs |CPB−GR| {cg:.4}, |DO3−GR| {dg:.4}"));
    }
    (ok, parts.join("; "))
}

fn property_suite() -> (bool, String) {
    let mut failures = Vec::new();
    let cfg = solver();
    let mut hermitian = 0.0f64;
    let mut tensor = 0.0f64;
    for v in Variant::ALL {
        let sys = System::build(&ModelSpec::default_for(v), &REFERENCE).expect("system");
        hermitian = hermitian.max(sys.h0().residual()).max(sys.drive().residual());
        let free = System::build(&ModelSpec::default_for(v), &REFERENCE.with_g(0.0)).expect("system");
        let mut sums: Vec<f64> = free
            .transmon_energies()
            .iter()
            .flat_map(|e| (0..free.resonator_levels()).map(move |k| e + k as f64 * REFERENCE.omega_r))
            .collect();
        sums.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let got = eigenvalues(free.h0()).expect("spectrum");
        tensor = got.iter().zip(&sums).fold(tensor, |m, (a, b)| m.max((a - b).abs()));
    }
    if hermitian > 1e-12 {
        failures.push(format!("hermiticity {hermitian:e}"));
    }
    if tensor > 1e-9 {
        failures.push(format!("tensor sum {tensor:e}"));
    }

    let h = build_gr(&REFERENCE, Variant::Gr, 6).expect("gr");
    let x = eigenvalues(&couple_with_resonator(&h, &ModelSpec::new(Variant::Gr, 6, 4).expect("spec"), &REFERENCE).expect("x"))
        .expect("spectrum");
    let p = eigenvalues(&couple_with_resonator(&h, &ModelSpec::new(Variant::Do3, 6, 4).expect("spec"), &REFERENCE).expect("p"))
        .expect("spectrum");
    let phase = x.iter().zip(&p).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if phase > 1e-9 {
        failures.push(format!("coupling phase {phase:e}"));
    }

    let mut norm = 0.0f64;
    for v in Variant::HIERARCHY {
        let prop = Propagator::build(&ModelSpec::default_for(v), &REFERENCE).expect("propagator");
        let w01 = prop.transition((0, 0), (1, 0)).expect("ω01");
        let drive = Drive::single(DriveComponent::new(Envelope::drag(0.05, 20.0, 0.3), w01)).expect("drive");
        let psi = prop.final_state(&drive, &prop.ground_state(), 20.0, &cfg).expect("evolution");
        norm = norm.max((psi.norm() - 1.0).abs());
    }
    if norm > NORM_TOL {
        failures.push(format!("norm drift {norm:e}"));
    }

    let fine = cfg.with_rel_tol(1e-10).with_abs_tol(1e-12);
    let goat = GoatSettings {
        duration: 20.0,
        ..Default::default()
    };
    let mut gradient = 0.0f64;
    for v in [Variant::Do3, Variant::R] {
        let obj = DragObjective::new(&model(v), &goat, &fine).expect("objective");
        let pt = ControlPoint::new(0.021, 0.15);
        let g = obj.value_and_gradient(&pt).expect("gradient");
        let h = 1e-5;
        let f = |a: f64, b: f64| obj.value(&ControlPoint::new(a, b)).expect("value");
        let fd_a = (f(pt.amplitude + h * 1e-3, pt.beta) - f(pt.amplitude - h * 1e-3, pt.beta)) / (2e-3 * h);
        let fd_b = (f(pt.amplitude, pt.beta + h) - f(pt.amplitude, pt.beta - h)) / (2.0 * h);
        gradient = gradient
            .max(((g.d_amplitude - fd_a) / fd_a).abs())
            .max(((g.d_beta - fd_b) / fd_b).abs());
    }
    if gradient > GRADIENT_TOL {
        failures.push(format!("gradient vs FD {gradient:e}"));
    }

    let zigzag = Trajectory {
        points: [(1.0, 0.0), (2.0, 1.0), (3.0, -1.0), (4.0, 0.0)]
            .iter()
            .map(|&(a, b)| ControlPoint::new(a * 1e-3, b))
            .collect(),
        objectives: vec![0.0; 4],
        termination: Termination::Converged,
    };
    let r = r_metric(&zigzag, &CoordinateScale::default()).expect("metric");
    if r < 1.0 {
        failures.push(format!("R_γ {r}"));
    }

    let mut inversion = 0.0f64;
    for v in [Variant::Cpb, Variant::Do3, Variant::Gr] {
        let spec = ModelSpec::default_for(v);
        let f = spectral_features(&spec, &REFERENCE).expect("features");
        let m = Measurements::from_features(&f, REFERENCE.omega_r).expect("measurements");
        let seed = invert_closed_form(&m).expect("closed form");
        let q = refine_parameters(&m, &spec, &seed).expect("inversion");
        for (got, want) in [(q.ec, REFERENCE.ec), (q.ej, REFERENCE.ej), (q.g, REFERENCE.g)] {
            inversion = inversion.max(((got - want) / want).abs());
        }
    }
    if inversion > INVERSION_TOL {
        failures.push(format!("inversion {inversion:e}"));
    }

    let cpb = System::build(&ModelSpec::default_for(Variant::Cpb), &REFERENCE.with_g(0.0)).expect("cpb");
    let n_r = cpb.resonator_levels();
    let d = cpb.drive().matrix();
    let prefactor = REFERENCE.eta().charge_prefactor();
    let mut decay = 0.0f64;
    let mut ladder = 0.0f64;
    for j in 0..2 {
        let nn = d[(j * n_r, (j + 1) * n_r)].norm();
        decay = decay.max(d[(j * n_r, (j + 2) * n_r)].norm() / nn);
        ladder = ladder.max((nn / (((j + 1) as f64).sqrt() * prefactor) - 1.0).abs());
    }
    if decay >= 0.05 || ladder >= LADDER_TOL {
        failures.push(format!("matrix elements: next-nearest/nearest {decay:.3e}, ladder deviation {ladder:.3}"));
    }

    (
        failures.is_empty(),
        format!(
            "hermiticity {hermitian:.1e}, tensor sum {tensor:.1e}, coupling phase {phase:.1e}, norm {norm:.1e} (< {NORM_TOL:e}), gradient {gradient:.1e} (< {GRADIENT_TOL:e}), R_γ {r:.3} ≥ 1, inversion {inversion:.1e} (< {INVERSION_TOL:e}), next-nearest ratio {decay:.1e}, ladder deviation {ladder:.3}{}",
            if failures.is_empty() { String::new() } else { format!("; failed: {}", failures.join(", ")) }
        ),
    )
}

fn benchmark_ordering() -> (bool, String) {
    let durations: Vec<f64> = (0..8).map(|k| 10.0 + 20.0 * k as f64).collect();
    let report = runtime_bench(&Variant::HIERARCHY, &REFERENCE, &durations, 0.075, BENCH_REPEATS, &solver()).expect("bench");
    let slope = |v: Variant| report.get(v).expect("timing").slope;
    let speedup = |v: Variant| report.get(v).and_then(|m| m.speedup).expect("speedup");
    let (c, d, g, r) = (slope(Variant::Cpb), slope(Variant::Do3), slope(Variant::Gr), slope(Variant::R));
    let fits = report.models.iter().map(|m| m.r_squared).fold(f64::INFINITY, f64::min);
    let ok = r < g && g < d && d <= c && speedup(Variant::Gr) >= GR_SPEEDUP_MIN && speedup(Variant::R) >= R_SPEEDUP_MIN;
    (
        ok,
        format!(
            "slopes (ms/ns) CPB {:.3}, DO3 {:.3}, GR {:.3}, R {:.3}; speedups DO3 {:.2}, GR {:.2} (≥ {GR_SPEEDUP_MIN}), R {:.2} (≥ {R_SPEEDUP_MIN}); min R² {fits:.3}",
            c * 1e3,
            d * 1e3,
            g * 1e3,
            r * 1e3,
            speedup(Variant::Do3),
            speedup(Variant::Gr),
            speedup(Variant::R)
        ),
    )
}

fn timed(id: u32, title: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = f();
    let outcome = Outcome {
        id,
        title,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    };
    print_line(&outcome);
    outcome
}

fn print_line(o: &Outcome) {
    let status = match (o.passed, KNOWN_UNATTAINABLE.contains(&o.id)) {
        (true, _) => "PASS",
        (false, true) => "FAIL (known)",
        (false, false) => "FAIL",
    };
    println!("[{status}] criterion {:>2} {}: {} [{:.1} s]", o.id, o.title, o.detail, o.seconds);
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |id: u32| selected.is_empty() || selected.contains(&id);
    let checks: [(u32, &'static str, fn() -> (bool, String)); 8] = [
        (1, "spectral deviation", spectral_deviation),
        (2, "GR closed forms", gr_closed_forms),
        (3, "Rabi divergence", rabi_divergence),
        (4, "π/2 amplitudes", pi2_amplitudes),
        (5, "GR3 attribution", gr3_attribution),
        (6, "detuned cross-section", detuned_cross_section),
        (7, "landscape deviation", landscape_deviation),
        (8, "convergence dimensions", convergence_dims),
    ];
    let mut outcomes: Vec<Outcome> = checks
        .into_iter()
        .filter(|(id, _, _)| wanted(*id))
        .map(|(id, title, f)| timed(id, title, f))
        .collect();
    if wanted(9) || wanted(10) {
        let start = Instant::now();
        let runs = run_ensembles();
        let ensemble_seconds = start.elapsed().as_secs_f64();
        for (id, title, (passed, detail)) in [
            (9, "R_γ ensemble", ensemble_statistics(&runs)),
            (10, "endpoint geometry", endpoint_geometry(&runs)),
        ] {
            let o = Outcome {
                id,
                title,
                passed,
                detail,
                seconds: ensemble_seconds,
            };
            print_line(&o);
            outcomes.push(o);
        }
    }
    if wanted(11) {
        outcomes.push(timed(11, "property suite", property_suite));
    }
    if wanted(12) {
        outcomes.push(timed(12, "benchmark ordering", benchmark_ordering));
    }

    let unexpected: Vec<u32> = outcomes
        .iter()
        .filter(|o| !o.passed && !KNOWN_UNATTAINABLE.contains(&o.id))
        .map(|o| o.id)
        .collect();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("acceptance: {passed}/{} criteria pass", outcomes.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
