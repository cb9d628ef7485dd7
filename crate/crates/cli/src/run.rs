//! Experiment dispatch and artifact output (CSV plus a JSON provenance
//! sidecar per table).

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;
use serde_json::json;
use transmon_core::experiments::{
    calibrate_amplitude_scale, calibrate_stark_frequency, detuning_cross_section,
    detuning_infidelity_map, gr3_delta_curves, linspace, optimize_pi2_amplitude, pi2_grid,
    rabi_amplitude_sweep, GaussianProbe, Model,
};
use transmon_core::landscape::{
    endpoint_stats, landscape_diff, landscape_grid, locate_optimum, trajectory_ensemble,
    write_matrix, DragObjective, EnsembleSettings,
};
use transmon_core::propagator::{convergence_scan, probe_pulse};
use transmon_core::spectra::ejc_sweep;
use transmon_core::{ModelSpec, Propagator, Variant};

use crate::bench::runtime_bench;
use crate::config::RunConfig;
use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SpectraSweep,
    RabiSweep,
    Pi2Optimize,
    Calibrate,
    DetuningMap,
    Gr3Compare,
    Landscape,
    GoatEnsemble,
    ConvergeDims,
    Bench,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::SpectraSweep => "spectra-sweep",
            Experiment::RabiSweep => "rabi-sweep",
            Experiment::Pi2Optimize => "pi2-optimize",
            Experiment::Calibrate => "calibrate",
            Experiment::DetuningMap => "detuning-map",
            Experiment::Gr3Compare => "gr3-compare",
            Experiment::Landscape => "landscape",
            Experiment::GoatEnsemble => "goat-ensemble",
            Experiment::ConvergeDims => "converge-dims",
            Experiment::Bench => "bench",
        }
    }
}

/// Output directory plus the resolved configuration stamped into sidecars.
pub struct Output<'a> {
    dir: PathBuf,
    experiment: Experiment,
    config: &'a RunConfig,
    pub written: Vec<PathBuf>,
}

impl<'a> Output<'a> {
    pub fn new(dir: &Path, experiment: Experiment, config: &'a RunConfig) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Output {
            dir: dir.to_path_buf(),
            experiment,
            config,
            written: Vec::new(),
        })
    }

    fn create(&mut self, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(path.clone());
        Ok((path, BufWriter::new(file)))
    }

    /// Writes `<stem>.csv` through `body` and `<stem>.json` with provenance
    /// and `summary`.
    pub fn table<F, S>(&mut self, stem: &str, body: F, summary: &S) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
        S: Serialize,
    {
        let (path, mut w) = self.create(&format!("{stem}.csv"))?;
        body(&mut w)
            .and_then(|_| w.flush())
            .map_err(|source| CliError::Io { path, source })?;
        let sidecar = json!({
            "experiment": self.experiment.name(),
            "table": format!("{stem}.csv"),
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.config.seed,
            "params": self.config.params,
            "solver": self.config.solver,
            "config": self.config,
            "summary": summary,
        });
        let (path, mut w) = self.create(&format!("{stem}.json"))?;
        serde_json::to_writer_pretty(&mut w, &sidecar)?;
        writeln!(w)
            .and_then(|_| w.flush())
            .map_err(|source| CliError::Io { path, source })?;
        Ok(())
    }
}

fn models_of(cfg: &RunConfig) -> Vec<Model> {
    cfg.models
        .iter()
        .map(|&v| Model::new(ModelSpec::default_for(v), cfg.params))
        .collect()
}

fn model(cfg: &RunConfig, v: Variant) -> Model {
    Model::new(ModelSpec::default_for(v), cfg.params)
}

/// Runs one experiment and returns the files it wrote.
pub fn run_experiment(experiment: Experiment, cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let mut out = Output::new(out_dir, experiment, cfg)?;
    let solver = cfg.solver;
    info!("running {} into {}", experiment.name(), out_dir.display());
    match experiment {
        Experiment::SpectraSweep => {
            let specs: Vec<ModelSpec> = cfg.models.iter().map(|&v| ModelSpec::default_for(v)).collect();
            let rows = ejc_sweep(cfg.spectra.mode, &cfg.spectra.n_exp, &cfg.params, &specs)?;
            out.table(
                "spectra_sweep",
                |w| {
                    writeln!(w, "n_exp,model,ec,ej,omega01,anharmonicity,chi")?;
                    for r in &rows {
                        let opt = |x: Option<f64>| x.map(|v| format!("{v:.16e}")).unwrap_or_default();
                        writeln!(
                            w,
                            "{:.16e},{},{:.16e},{:.16e},{:.16e},{},{}",
                            r.n_exp,
                            r.model,
                            r.ec,
                            r.ej,
                            r.omega01,
                            opt(r.anharmonicity),
                            opt(r.chi)
                        )?;
                    }
                    Ok(())
                },
                &json!({ "rows": rows.len(), "mode": cfg.spectra.mode }),
            )?;
        }
        Experiment::RabiSweep => {
            let r = &cfg.rabi;
            let amps = linspace(0.0, r.amp_max, r.points);
            let sweep = rabi_amplitude_sweep(&models_of(cfg), &r.probe(), &amps, &solver)?;
            let summary: Vec<_> = pairs(&cfg.models)
                .map(|(a, b)| {
                    json!({ "a": a, "b": b, "max_abs_difference":
                        sweep.max_abs_difference(a.name(), b.name()) })
                })
                .collect();
            out.table("rabi_sweep", |w| sweep.write_csv(w), &summary)?;
        }
        Experiment::Pi2Optimize => {
            let p = &cfg.pi2;
            let probe = GaussianProbe {
                duration: p.duration,
                sigma_ratio: p.sigma_ratio,
            };
            let grid = pi2_grid(p.center, p.half_width, p.step);
            let mut rows = Vec::new();
            for m in models_of(cfg) {
                let amp = optimize_pi2_amplitude(&m, &probe, &grid, &solver)?;
                rows.push((m.spec.variant, amp));
            }
            out.table(
                "pi2_amplitudes",
                |w| {
                    writeln!(w, "model,amplitude_ghz")?;
                    for (v, a) in &rows {
                        writeln!(w, "{v},{a:.16e}")?;
                    }
                    Ok(())
                },
                &json!({ "grid_points": grid.len() }),
            )?;
        }
        Experiment::Calibrate => {
            let c = &cfg.calibrate;
            let (a, b) = (model(cfg, c.reference), model(cfg, c.target));
            let env = GaussianProbe {
                duration: c.duration,
                sigma_ratio: c.sigma_ratio,
            }
            .envelope(c.amplitude);
            let scale = calibrate_amplitude_scale(&a, &b, &env, &Default::default(), &solver)?;
            let mut stark = Vec::new();
            for (m, amp) in [(a, c.stark_amplitude), (b, scale * c.stark_amplitude)] {
                let w01 = Propagator::build(&m.spec, &m.params)?.transition((0, 0), (1, 0))?;
                let window = (w01 - c.stark_half_window, w01 + c.stark_half_window);
                let f = calibrate_stark_frequency(&m, amp, window, &Default::default(), &solver)?;
                stark.push((m.spec.variant, amp, w01, f));
            }
            out.table(
                "calibration",
                |w| {
                    writeln!(w, "model,stark_amplitude_ghz,omega01_ghz,stark_shifted_ghz")?;
                    for (v, amp, w01, f) in &stark {
                        writeln!(w, "{v},{amp:.16e},{w01:.16e},{f:.16e}")?;
                    }
                    Ok(())
                },
                &json!({ "amplitude_scale": scale, "reference": c.reference, "target": c.target }),
            )?;
        }
        Experiment::DetuningMap => {
            let d = &cfg.detuning;
            let detunings = linspace(d.detuning_min, d.detuning_max, d.detuning_points);
            match d.cross_section {
                Some(ratio) => {
                    let cs = detuning_cross_section(ratio, &detunings, &cfg.params, &d.pulse, &solver)?;
                    let c = &cs.calibration;
                    let transitions = transmon_core::spectra::transition_frequencies(
                        &c.reference.spec,
                        &c.reference.params,
                        3,
                    )?;
                    let marks: Vec<_> = transitions
                        .iter()
                        .map(|t| json!({ "from": t.from, "to": t.to, "photons": t.photons,
                            "detuning_ghz": t.frequency - c.omega01 }))
                        .collect();
                    out.table(
                        "detuning_cross_section",
                        |w| {
                            writeln!(w, "detuning_ghz,max_infidelity")?;
                            for (x, f) in cs.detunings.iter().zip(&cs.infidelity) {
                                writeln!(w, "{x:.16e},{f:.16e}")?;
                            }
                            Ok(())
                        },
                        &json!({ "calibration": c, "transitions": marks }),
                    )?;
                }
                None => {
                    let ratios = linspace(d.ratio_min, d.ratio_max, d.ratio_points);
                    let map = detuning_infidelity_map(&ratios, &detunings, &cfg.params, &d.pulse, &solver)?;
                    let masked: Vec<f64> = map.rows.iter().filter(|r| r.masked.is_some()).map(|r| r.ratio).collect();
                    let calibrations: Vec<_> = map.rows.iter().filter_map(|r| r.calibration.as_ref()).collect();
                    out.table(
                        "detuning_map",
                        |w| map.write_csv(w),
                        &json!({ "masked_ratios": masked, "calibrations": calibrations }),
                    )?;
                }
            }
        }
        Experiment::Gr3Compare => {
            let r = &cfg.gr3;
            let amps = linspace(0.0, r.amp_max, r.points);
            let sweep = gr3_delta_curves(&cfg.params, &r.probe(), &amps, &solver)?;
            let peak = |name: &str| {
                sweep
                    .get(name)
                    .map(|v| v.iter().fold(0.0f64, |m, x| m.max(x.abs())))
            };
            let summary = json!({
                "max_abs_delta_gr3_do3": peak("delta_gr3_do3"),
                "max_abs_delta_gr3_gr": peak("delta_gr3_gr"),
            });
            out.table("gr3_compare", |w| sweep.write_csv(w), &summary)?;
        }
        Experiment::Landscape => {
            let l = &cfg.landscape;
            let probe = GaussianProbe {
                duration: l.time_max,
                sigma_ratio: l.sigma_ratio,
            };
            let amps = linspace(0.0, l.amp_max, l.amp_points);
            let times = linspace(l.time_min, l.time_max, l.time_points);
            let a = landscape_grid(&model(cfg, l.reference), &probe, &amps, &times, &solver)?;
            let b = landscape_grid(&model(cfg, l.target), &probe, &amps, &times, &solver)?;
            let diff = landscape_diff(&a, &b)?;
            let max = diff.iter().flatten().fold(0.0f64, |m, &x| m.max(x));
            for (grid, v) in [(&a, l.reference), (&b, l.target)] {
                out.table(&format!("landscape_{v}"), |w| grid.write_csv(w), &json!({ "model": v }))?;
            }
            out.table(
                "landscape_diff",
                |w| write_matrix(w, &amps, &times, &diff, "abs_difference"),
                &json!({ "max_abs_difference": max, "reference": l.reference, "target": l.target }),
            )?;
        }
        Experiment::GoatEnsemble => {
            let e = &cfg.ensemble;
            let settings = EnsembleSettings {
                size: e.size,
                seed: cfg.seed,
                relative_sigma: e.relative_sigma,
            };
            let mut summary = Vec::new();
            for m in models_of(cfg) {
                let objective = DragObjective::new(&m, &cfg.goat, &solver)?;
                let optimum = *locate_optimum(&objective, e.scan_max_amplitude, e.scan_points)?.end();
                let ens = trajectory_ensemble(&objective, &optimum, &settings)?;
                let trajs: Vec<_> = ens.members.iter().map(|m| m.trajectory.clone()).collect();
                let stats = endpoint_stats(&trajs, &cfg.goat.scale).ok();
                let name = m.name();
                out.table(
                    &format!("goat_{name}"),
                    |w| {
                        writeln!(w, "trajectory,step,amplitude_ghz,beta_ns,p1,termination")?;
                        for mem in &ens.members {
                            let t = &mem.trajectory;
                            let term = serde_json::to_value(t.termination).unwrap_or_default();
                            for (k, (p, f)) in t.points.iter().zip(&t.objectives).enumerate() {
                                writeln!(
                                    w,
                                    "{},{k},{:.16e},{:.16e},{f:.16e},{}",
                                    mem.index,
                                    p.amplitude,
                                    p.beta,
                                    term.as_str().unwrap_or("")
                                )?;
                            }
                        }
                        Ok(())
                    },
                    &json!({ "optimum": optimum, "r_mean": ens.r_mean, "r_std": ens.r_std,
                        "counted": ens.counted, "terminated_fraction": ens.fraction_terminated(),
                        "endpoints": stats }),
                )?;
                summary.push(json!({ "model": name, "r_mean": ens.r_mean, "r_std": ens.r_std }));
            }
            out.table(
                "goat_summary",
                |w| {
                    writeln!(w, "model,r_mean,r_std")?;
                    for s in &summary {
                        writeln!(w, "{},{},{}", s["model"].as_str().unwrap_or(""), s["r_mean"], s["r_std"])?;
                    }
                    Ok(())
                },
                &summary,
            )?;
        }
        Experiment::ConvergeDims => {
            let mut rows = Vec::new();
            for m in models_of(cfg) {
                let w01 = Propagator::build(&m.spec, &m.params)?.transition((0, 0), (1, 0))?;
                let scan = convergence_scan(&m.spec, &m.params, &probe_pulse(w01), cfg.converge.tol, &solver)?;
                rows.push((m.spec.variant, scan));
            }
            out.table(
                "convergence_dims",
                |w| {
                    writeln!(w, "model,levels,deviation")?;
                    for (v, scan) in &rows {
                        for (n, d) in &scan.deviations {
                            writeln!(w, "{v},{n},{d:.16e}")?;
                        }
                    }
                    Ok(())
                },
                &rows.iter().map(|(v, s)| json!({ "model": v, "dimension": s.dimension })).collect::<Vec<_>>(),
            )?;
        }
        Experiment::Bench => {
            let b = &cfg.bench;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .map_err(|e| CliError::Validation {
                    field: "threads",
                    reason: e.to_string(),
                })?;
            let report = pool.install(|| {
                runtime_bench(&cfg.models, &cfg.params, &b.durations, b.amplitude, b.repeats, &solver)
            })?;
            out.table(
                "bench",
                |w| {
                    writeln!(w, "model,duration_ns,wall_s,normalized")?;
                    for m in &report.models {
                        for (k, (t, s)) in m.samples.iter().enumerate() {
                            let norm = m.normalized.as_ref().map(|n| format!("{:.16e}", n[k])).unwrap_or_default();
                            writeln!(w, "{},{t:.16e},{s:.16e},{norm}", m.model)?;
                        }
                    }
                    Ok(())
                },
                &report,
            )?;
        }
    }
    Ok(out.written)
}

fn pairs(models: &[Variant]) -> impl Iterator<Item = (Variant, Variant)> + '_ {
    models
        .iter()
        .enumerate()
        .flat_map(move |(i, &a)| models[i + 1..].iter().map(move |&b| (a, b)))
}

/// Keeps experiments' public names in one place for the usage text.
pub fn experiment_names() -> Vec<&'static str> {
    use clap::ValueEnum;
    Experiment::value_variants().iter().map(|e| e.name()).collect()
}
