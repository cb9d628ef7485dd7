//! Time-dependent Schrödinger propagation of driven transmon–resonator
//! systems.
//!
//! The equation i dψ/dt = 2π[H₀ + V(t) H_d] ψ is integrated exactly (no
//! rotating-wave approximation) in the interaction picture of H₀: with the
//! dressed eigenbasis H₀ = Σ E_k |k⟩⟨k| and ψ = Σ e^{−2πi E_k t} c_k |k⟩,
//!
//!   dc_j/dt = −2πi V(t) Σ_k e^{2πi (E_j − E_k) t} D_jk c_k,   D = ⟨j|H_d|k⟩.
//!
//! The fast free evolution is carried analytically, so the adaptive steps
//! only have to resolve the drive.
//!
//! Dressed states are ordered by their bare label: index `j * n_r + k` holds
//! the dressed state labelled |j, k⟩. Every dressed vector is rephased so its
//! bare-label component is real and positive.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::io::Write;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{CMatrix, EnergyParams, HermitianOperator, ModelSpec, Variant};
use crate::ode::{self, SolverStats, Tolerances};
use crate::pulse::{Drive, DriveComponent, Envelope, REFERENCE_SIGMA_RATIO};
use crate::spectra::{dressed_labels, eigensystem, DressedLabelMap, Label};
use crate::system::System;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Step budget for a single evolution.
pub const MAX_STEPS: usize = 20_000_000;

/// Per-step tolerances are this factor tighter than the configured ones, so
/// the error accumulated over a few thousand carrier periods stays within the
/// configured tolerance.
const LOCAL_TOLERANCE_FACTOR: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// Bare products |j⟩ ⊗ |k⟩ of uncoupled transmon eigenstates and Fock states.
    Bare,
    /// Dressed eigenstates of H₀, ordered by bare label.
    Dressed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    pub variant: Option<Variant>,
    pub transmon_levels: usize,
    pub resonator_levels: usize,
    pub kind: BasisKind,
}

impl Basis {
    pub fn dim(&self) -> usize {
        self.transmon_levels * self.resonator_levels
    }

    pub fn index(&self, (j, k): Label) -> Result<usize> {
        if j >= self.transmon_levels || k >= self.resonator_levels {
            return Err(Error::UnknownLabel {
                transmon: j,
                resonator: k,
            });
        }
        Ok(j * self.resonator_levels + k)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amplitudes: DVector<C64>,
    basis: Basis,
}

impl QuantumState {
    pub fn new(amplitudes: DVector<C64>, basis: Basis) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amplitudes.len(),
            });
        }
        Ok(QuantumState { amplitudes, basis })
    }

    pub fn basis_state(basis: Basis, label: Label) -> Result<Self> {
        let mut v = DVector::from_element(basis.dim(), ZERO);
        v[basis.index(label)?] = C64::new(1.0, 0.0);
        Ok(QuantumState {
            amplitudes: v,
            basis,
        })
    }

    /// Normalized Σ_i w_i |label_i⟩.
    pub fn superposition(basis: Basis, terms: &[(Label, C64)]) -> Result<Self> {
        let mut v = DVector::from_element(basis.dim(), ZERO);
        for &(label, w) in terms {
            v[basis.index(label)?] += w;
        }
        let n = v.norm();
        if n == 0.0 {
            return Err(invalid("terms", "superposition has zero norm"));
        }
        Ok(QuantumState {
            amplitudes: v / C64::new(n, 0.0),
            basis,
        })
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn amplitude(&self, label: Label) -> Result<C64> {
        Ok(self.amplitudes[self.basis.index(label)?])
    }

    /// |⟨label|ψ⟩|².
    pub fn probability(&self, label: Label) -> Result<f64> {
        Ok(self.amplitude(label)?.norm_sqr())
    }

    /// Total weight on transmon level `j`, summed over photon numbers.
    pub fn transmon_population(&self, j: usize) -> f64 {
        if j >= self.basis.transmon_levels {
            return 0.0;
        }
        let n_r = self.basis.resonator_levels;
        (0..n_r)
            .map(|k| self.amplitudes[j * n_r + k].norm_sqr())
            .sum()
    }

    /// Embeds into a larger transmon space with zero amplitudes.
    pub fn padded(&self, transmon_levels: usize) -> Result<Self> {
        if transmon_levels < self.basis.transmon_levels {
            return Err(Error::DimensionMismatch {
                expected: self.basis.transmon_levels,
                found: transmon_levels,
            });
        }
        let basis = Basis {
            transmon_levels,
            ..self.basis
        };
        let mut v = DVector::from_element(basis.dim(), ZERO);
        v.rows_mut(0, self.dim()).copy_from(&self.amplitudes);
        Ok(QuantumState {
            amplitudes: v,
            basis,
        })
    }
}

/// |⟨a|b⟩|² after zero-padding the smaller transmon space.
pub fn state_fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    let (ba, bb) = (a.basis(), b.basis());
    if ba.resonator_levels != bb.resonator_levels {
        return Err(Error::DimensionMismatch {
            expected: ba.resonator_levels,
            found: bb.resonator_levels,
        });
    }
    if ba.kind != bb.kind {
        return Err(invalid("basis", "cannot compare bare and dressed states"));
    }
    let n = a.dim().min(b.dim());
    let overlap: C64 = (0..n)
        .map(|i| a.amplitudes[i].conj() * b.amplitudes[i])
        .sum();
    let norms = a.amplitudes.norm_squared() * b.amplitudes.norm_squared();
    Ok((overlap.norm_sqr() / norms).clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_output_points")]
    pub output_points: usize,
}

fn default_rel_tol() -> f64 {
    1e-6
}

fn default_abs_tol() -> f64 {
    1e-8
}

fn default_output_points() -> usize {
    5000
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rel_tol: default_rel_tol(),
            abs_tol: default_abs_tol(),
            output_points: default_output_points(),
        }
    }
}

impl SolverConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_output_points(mut self, n: usize) -> Self {
        self.output_points = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(invalid("rel_tol", "must be positive"));
        }
        if !(self.abs_tol > 0.0) {
            return Err(invalid("abs_tol", "must be positive"));
        }
        if self.output_points < 2 {
            return Err(invalid("output_points", "need at least 2"));
        }
        Ok(())
    }

    pub(crate) fn tolerances(&self) -> Tolerances {
        Tolerances {
            rtol: self.rel_tol * LOCAL_TOLERANCE_FACTOR,
            atol: self.abs_tol * LOCAL_TOLERANCE_FACTOR,
            max_steps: MAX_STEPS,
        }
    }

    /// `output_points` uniformly spaced times on [0, duration].
    pub fn time_grid(&self, duration: f64) -> Vec<f64> {
        let n = self.output_points;
        let mut t: Vec<f64> = (0..n)
            .map(|i| duration * i as f64 / (n - 1) as f64)
            .collect();
        t[n - 1] = duration;
        t
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionRecord {
    pub times: Vec<f64>,
    /// Dressed-basis states at each time.
    pub states: Vec<QuantumState>,
    labels: DressedLabelMap,
    pub stats: SolverStats,
}

impl EvolutionRecord {
    pub fn labels(&self) -> &DressedLabelMap {
        &self.labels
    }

    pub fn population(&self, label: Label, t_index: usize) -> Result<f64> {
        self.labels.get(label)?;
        let state = self
            .states
            .get(t_index)
            .ok_or_else(|| invalid("t_index", format!("{t_index} out of range")))?;
        state.probability(label)
    }

    /// Time series of one dressed-label population.
    pub fn populations(&self, label: Label) -> Result<Vec<f64>> {
        self.labels.get(label)?;
        self.states.iter().map(|s| s.probability(label)).collect()
    }

    pub fn final_state(&self) -> &QuantumState {
        self.states.last().expect("record holds at least two states")
    }

    /// CSV with a `time_ns` column followed by one column per labelled state.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let labels: Vec<Label> = self.labels.labels().collect();
        write!(w, "time_ns")?;
        for (j, k) in &labels {
            write!(w, ",p_{j}_{k}")?;
        }
        writeln!(w)?;
        for (t, s) in self.times.iter().zip(&self.states) {
            write!(w, "{t:.16e}")?;
            for &l in &labels {
                let p = s.probability(l).unwrap_or(f64::NAN);
                write!(w, ",{p:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Dressed frame of a static Hamiltonian with a drive operator expressed in it.
#[derive(Clone, Debug)]
pub struct Propagator {
    basis: Basis,
    labels: DressedLabelMap,
    /// Dressed energies relative to the dressed ground state (GHz).
    energies: Vec<f64>,
    /// Columns are dressed states in the bare basis, in label order.
    frame: CMatrix,
    /// ⟨j|H_d|k⟩ in the dressed frame, row-major.
    coupling: Vec<C64>,
    /// Row offsets into `columns`/`values`: the entries of `coupling` above
    /// the numerical-zero threshold.
    row_start: Vec<usize>,
    columns: Vec<usize>,
    values: Vec<C64>,
}

/// Dressed drive elements below this fraction of the largest are exact zeros
/// up to round-off (parity selection rules).
const SPARSITY_THRESHOLD: f64 = 1e-14;

impl Propagator {
    pub fn new(
        h0: &HermitianOperator,
        h_drive: &HermitianOperator,
        variant: Option<Variant>,
        transmon_levels: usize,
        resonator_levels: usize,
    ) -> Result<Self> {
        let dim = transmon_levels * resonator_levels;
        if h0.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: h0.dim(),
            });
        }
        if h_drive.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: h_drive.dim(),
            });
        }
        let (energies, vectors) = eigensystem(h0)?;
        let labels = dressed_labels(&vectors, transmon_levels, resonator_levels)?;
        let order = complete_assignment(&vectors, &labels);
        let e0 = energies[order[0]];
        let mut frame = CMatrix::zeros(dim, dim);
        let mut rel = Vec::with_capacity(dim);
        for (b, &e) in order.iter().enumerate() {
            let col = vectors.column(e);
            let x = col[b];
            let phase = if x.norm() > 0.0 {
                x.conj() / x.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            frame.set_column(b, &(col * phase));
            rel.push(energies[e] - e0);
        }
        let d = frame.adjoint() * h_drive.matrix() * &frame;
        let coupling: Vec<C64> = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| d[(i, j)])
            .collect();
        let largest = coupling.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut row_start = Vec::with_capacity(dim + 1);
        let mut columns = Vec::new();
        let mut values = Vec::new();
        for i in 0..dim {
            row_start.push(columns.len());
            for j in 0..dim {
                let z = coupling[i * dim + j];
                if z.norm() > SPARSITY_THRESHOLD * largest {
                    columns.push(j);
                    values.push(z);
                }
            }
        }
        row_start.push(columns.len());
        Ok(Propagator {
            basis: Basis {
                variant,
                transmon_levels,
                resonator_levels,
                kind: BasisKind::Dressed,
            },
            labels,
            energies: rel,
            frame,
            coupling,
            row_start,
            columns,
            values,
        })
    }

    pub fn for_system(system: &System) -> Result<Self> {
        Propagator::new(
            system.h0(),
            system.drive(),
            Some(system.spec().variant),
            system.transmon_levels(),
            system.resonator_levels(),
        )
    }

    pub fn build(spec: &ModelSpec, params: &EnergyParams) -> Result<Self> {
        Propagator::for_system(&System::build(spec, params)?)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn labels(&self) -> &DressedLabelMap {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Dressed energy relative to the dressed ground state (GHz).
    pub fn energy(&self, label: Label) -> Result<f64> {
        Ok(self.energies[self.basis.index(label)?])
    }

    /// Dressed |0,1⟩... transition frequency E(to) − E(from) in GHz.
    pub fn transition(&self, from: Label, to: Label) -> Result<f64> {
        Ok(self.energy(to)? - self.energy(from)?)
    }

    /// Dressed-frame matrix element ⟨a|H_d|b⟩.
    pub fn drive_element(&self, a: Label, b: Label) -> Result<C64> {
        let (i, j) = (self.basis.index(a)?, self.basis.index(b)?);
        Ok(self.coupling[i * self.dim() + j])
    }

    pub fn dressed_state(&self, label: Label) -> Result<QuantumState> {
        self.labels.get(label)?;
        QuantumState::basis_state(self.basis, label)
    }

    pub fn ground_state(&self) -> QuantumState {
        QuantumState::basis_state(self.basis, (0, 0)).expect("ground label exists")
    }

    pub fn to_dressed(&self, state: &QuantumState) -> Result<QuantumState> {
        self.check_compatible(state)?;
        match state.basis.kind {
            BasisKind::Dressed => Ok(state.clone()),
            BasisKind::Bare => QuantumState::new(self.frame.adjoint() * &state.amplitudes, self.basis),
        }
    }

    pub fn to_bare(&self, state: &QuantumState) -> Result<QuantumState> {
        self.check_compatible(state)?;
        match state.basis.kind {
            BasisKind::Bare => Ok(state.clone()),
            BasisKind::Dressed => QuantumState::new(
                &self.frame * &state.amplitudes,
                Basis {
                    kind: BasisKind::Bare,
                    ..self.basis
                },
            ),
        }
    }

    fn check_compatible(&self, state: &QuantumState) -> Result<()> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        Ok(())
    }

    /// Interaction-picture right-hand side for coefficients `c` at time `t`.
    #[inline]
    pub(crate) fn apply(&self, v: f64, t: f64, c: &[C64], rot: &mut [C64], out: &mut [C64]) {
        let n = self.dim();
        if v == 0.0 {
            out.fill(ZERO);
            return;
        }
        for k in 0..n {
            let (s, co) = (TAU * self.energies[k] * t).sin_cos();
            rot[k] = C64::new(co, -s);
        }
        let scale = -TAU * v;
        for j in 0..n {
            let range = self.row_start[j]..self.row_start[j + 1];
            let mut acc = ZERO;
            for (&k, &d) in self.columns[range.clone()].iter().zip(&self.values[range]) {
                acc += d * (rot[k] * c[k]);
            }
            // −2πi V e^{+iθ_j} acc
            let w = rot[j].conj() * acc;
            out[j] = C64::new(-w.im, w.re) * scale;
        }
    }

    fn rotate_out(&self, t: f64, c: &[C64]) -> QuantumState {
        let amps = DVector::from_iterator(
            c.len(),
            c.iter().zip(&self.energies).map(|(&ck, &e)| {
                let (s, co) = (TAU * e * t).sin_cos();
                ck * C64::new(co, -s)
            }),
        );
        QuantumState {
            amplitudes: amps,
            basis: self.basis,
        }
    }

    fn rotate_in(&self, t: f64, a: &DVector<C64>) -> Vec<C64> {
        a.iter()
            .zip(&self.energies)
            .map(|(&ak, &e)| {
                let (s, co) = (TAU * e * t).sin_cos();
                ak * C64::new(co, s)
            })
            .collect()
    }

    /// Evolves `psi0` (taken to be the state at `t_start`) to each of `times`,
    /// which must be monotone from `t_start` towards `t_end`.
    pub fn evolve_between(
        &self,
        drive: &Drive,
        psi0: &QuantumState,
        t_start: f64,
        t_end: f64,
        times: &[f64],
        cfg: &SolverConfig,
    ) -> Result<(Vec<QuantumState>, SolverStats)> {
        cfg.validate()?;
        let psi = self.to_dressed(psi0)?;
        let n = self.dim();
        let c0 = self.rotate_in(t_start, &psi.amplitudes);
        let mut rot = vec![ZERO; n];
        let rhs = |t: f64, c: &[C64], out: &mut [C64]| {
            self.apply(drive.signal(t), t, c, &mut rot, out);
        };
        let (cs, stats) = ode::integrate(rhs, t_start, t_end, &c0, times, &cfg.tolerances())?;
        let states = times
            .iter()
            .zip(&cs)
            .map(|(&t, c)| self.rotate_out(t, c))
            .collect();
        Ok((states, stats))
    }

    pub fn evolve(
        &self,
        drive: &Drive,
        psi0: &QuantumState,
        duration: f64,
        cfg: &SolverConfig,
    ) -> Result<EvolutionRecord> {
        check_duration(duration)?;
        check_normalized(psi0)?;
        let times = cfg.time_grid(duration);
        let (states, stats) = self.evolve_between(drive, psi0, 0.0, duration, &times, cfg)?;
        Ok(EvolutionRecord {
            times,
            states,
            labels: self.labels.clone(),
            stats,
        })
    }

    /// State at `duration` only, skipping dense output.
    pub fn final_state(
        &self,
        drive: &Drive,
        psi0: &QuantumState,
        duration: f64,
        cfg: &SolverConfig,
    ) -> Result<QuantumState> {
        check_duration(duration)?;
        check_normalized(psi0)?;
        let (mut s, _) = self.evolve_between(drive, psi0, 0.0, duration, &[duration], cfg)?;
        Ok(s.pop().expect("one output requested"))
    }
}

fn check_duration(duration: f64) -> Result<()> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(invalid("duration", format!("must be positive, got {duration}")));
    }
    Ok(())
}

fn check_normalized(psi: &QuantumState) -> Result<()> {
    let n = psi.norm();
    if (n - 1.0).abs() > 1e-6 {
        return Err(invalid("psi0", format!("norm {n} differs from 1")));
    }
    Ok(())
}

/// Extends the confident labelling to a full label → eigenvector permutation,
/// pairing leftovers greedily by overlap.
fn complete_assignment(vectors: &CMatrix, labels: &DressedLabelMap) -> Vec<usize> {
    let dim = vectors.nrows();
    let n_r = labels.resonator_levels();
    let mut order = vec![usize::MAX; dim];
    let mut taken = vec![false; dim];
    for (j, k) in labels.labels() {
        let e = labels.get((j, k)).expect("listed label");
        order[j * n_r + k] = e;
        taken[e] = true;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for b in (0..dim).filter(|&b| order[b] == usize::MAX) {
        for e in (0..dim).filter(|&e| !taken[e]) {
            pairs.push((vectors[(b, e)].norm_sqr(), b, e));
        }
    }
    pairs.sort_by(|x, y| {
        y.0.partial_cmp(&x.0)
            .unwrap_or(Ordering::Equal)
            .then(x.1.cmp(&y.1))
            .then(x.2.cmp(&y.2))
    });
    for (_, b, e) in pairs {
        if order[b] == usize::MAX && !taken[e] {
            order[b] = e;
            taken[e] = true;
        }
    }
    order
}

/// Free-function form: builds the dressed frame from (h0, h_drive) and
/// evolves. `psi0` carries the dimensions.
pub fn evolve(
    h0: &HermitianOperator,
    h_drive: &HermitianOperator,
    drive: &[DriveComponent],
    psi0: &QuantumState,
    duration: f64,
    cfg: &SolverConfig,
) -> Result<EvolutionRecord> {
    let b = psi0.basis();
    let prop = Propagator::new(h0, h_drive, b.variant, b.transmon_levels, b.resonator_levels)?;
    prop.evolve(&Drive::new(drive.to_vec())?, psi0, duration, cfg)
}

pub fn population(record: &EvolutionRecord, label: Label, t_index: usize) -> Result<f64> {
    record.population(label, t_index)
}

/// Probe pulse for truncation scans: 142.2 ns Gaussian with a 75 MHz peak,
/// resonant with the dressed qubit transition.
pub fn probe_pulse(carrier_freq: f64) -> DriveComponent {
    DriveComponent::new(
        Envelope::gaussian(0.075, 142.2).with_sigma_ratio(REFERENCE_SIGMA_RATIO),
        carrier_freq,
    )
}

pub const MAX_SCAN_LEVELS: usize = 20;

/// Mean absolute change of the computational-subspace populations between
/// two runs sampled on the same grid.
pub fn subspace_deviation(a: &[QuantumState], b: &[QuantumState]) -> f64 {
    let f = a.len().min(b.len());
    let total: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            (0..2)
                .map(|m| (x.transmon_population(m) - y.transmon_population(m)).abs())
                .sum::<f64>()
        })
        .sum();
    total / f as f64
}

/// Smallest transmon truncation N at which the ground-state evolution under
/// `drive` differs from the N − 1 run by less than `tol`.
///
/// For the CPB, N counts charge states: the charge window n ∈ [lo, lo + N − 1]
/// with lo = −⌊(N − 1)/2⌋, keeping every eigenstate. The oscillator-based
/// variants truncate their Fock space to N levels, starting at the smallest
/// dimension their builders accept.
pub fn convergence_dimension(
    spec: &ModelSpec,
    params: &EnergyParams,
    drive: &DriveComponent,
    tol: f64,
    cfg: &SolverConfig,
) -> Result<usize> {
    Ok(convergence_scan(spec, params, drive, tol, cfg)?.dimension)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceScan {
    pub dimension: usize,
    /// (N, deviation from the N − 1 run).
    pub deviations: Vec<(usize, f64)>,
}

/// [`convergence_dimension`] with the full deviation history.
pub fn convergence_scan(
    spec: &ModelSpec,
    params: &EnergyParams,
    drive: &DriveComponent,
    tol: f64,
    cfg: &SolverConfig,
) -> Result<ConvergenceScan> {
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    if spec.variant == Variant::R {
        return Ok(ConvergenceScan {
            dimension: 2,
            deviations: Vec::new(),
        });
    }
    let drive = Drive::single(*drive)?;
    let duration = drive.duration();
    let first = if spec.variant == Variant::Cpb { 2 } else { 3 };
    let mut previous: Option<Vec<QuantumState>> = None;
    let mut deviations = Vec::new();
    for n in first..=MAX_SCAN_LEVELS {
        let prop = if spec.variant == Variant::Cpb {
            let lo = -((n as i64 - 1) / 2);
            let sys = System::cpb_window(params, lo, lo + n as i64 - 1, spec.resonator_levels)?;
            Propagator::for_system(&sys)?
        } else {
            Propagator::build(&spec.with_transmon_levels(n), params)?
        };
        let rec = prop.evolve(&drive, &prop.ground_state(), duration, cfg)?;
        if let Some(prev) = &previous {
            let d = subspace_deviation(&rec.states, prev);
            deviations.push((n, d));
            if d < tol {
                return Ok(ConvergenceScan {
                    dimension: n,
                    deviations,
                });
            }
        }
        previous = Some(rec.states);
    }
    Err(Error::NoConvergence {
        iterations: MAX_SCAN_LEVELS,
        residual: deviations.last().map_or(f64::INFINITY, |d| d.1),
    })
}
