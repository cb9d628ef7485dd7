//! Eigensystems, dressed-state labelling and spectral features.

use std::cmp::Ordering;

use nalgebra::SymmetricEigen;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{hermiticity_residual, CMatrix, EnergyParams, HermitianOperator, ModelSpec, Variant};
use crate::system::System;

/// Eigenvalues (ascending) and orthonormal eigenvectors (as columns).
///
/// Each eigenvector's largest component is made real and positive, so the
/// output does not depend on the phase chosen by the solver.
pub fn eigensystem(h: &HermitianOperator) -> Result<(Vec<f64>, CMatrix)> {
    eigensystem_of(h.matrix())
}

/// As [`eigensystem`], for a raw matrix; rejects non-Hermitian input.
pub fn eigensystem_of(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let residual = hermiticity_residual(m);
    if residual > 1e-12 {
        return Err(Error::NotHermitian { residual });
    }
    let n = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        let pivot = v
            .iter()
            .copied()
            .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(Ordering::Equal))
            .unwrap_or(C64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        for r in 0..n {
            vectors[(r, col)] = v[r] * phase;
        }
    }
    Ok((values, vectors))
}

pub fn eigenvalues(h: &HermitianOperator) -> Result<Vec<f64>> {
    Ok(eigensystem(h)?.0)
}

/// Bare product label |transmon, resonator⟩.
pub type Label = (usize, usize);

/// Assignment of bare product states to dressed eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct DressedLabelMap {
    n_t: usize,
    n_r: usize,
    index: Vec<Option<usize>>,
    overlap: Vec<f64>,
}

impl DressedLabelMap {
    pub fn transmon_levels(&self) -> usize {
        self.n_t
    }

    pub fn resonator_levels(&self) -> usize {
        self.n_r
    }

    /// Dressed eigenvector index for bare label (j, k).
    pub fn get(&self, (j, k): Label) -> Result<usize> {
        if j >= self.n_t || k >= self.n_r {
            return Err(Error::UnknownLabel {
                transmon: j,
                resonator: k,
            });
        }
        self.index[j * self.n_r + k].ok_or(Error::UnknownLabel {
            transmon: j,
            resonator: k,
        })
    }

    /// |⟨j,k|dressed⟩|² of the assigned eigenvector.
    pub fn overlap(&self, (j, k): Label) -> Option<f64> {
        let i = j * self.n_r + k;
        self.index.get(i).copied().flatten().map(|_| self.overlap[i])
    }

    /// Labels with an assigned dressed partner.
    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        (0..self.n_t * self.n_r)
            .filter(|&i| self.index[i].is_some())
            .map(|i| (i / self.n_r, i % self.n_r))
    }
}

/// Labels every bare state greedily by descending |overlap|², requiring the
/// low-lying labels (transmon ≤ 2, resonator ≤ 1) to be present.
pub fn dressed_labels(eigenvectors: &CMatrix, n_t: usize, n_r: usize) -> Result<DressedLabelMap> {
    let required: Vec<Label> = (0..n_t.min(3))
        .flat_map(|j| (0..n_r.min(2)).map(move |k| (j, k)))
        .collect();
    dressed_labels_requiring(eigenvectors, n_t, n_r, &required)
}

/// Greedy labelling; a label in `required` whose best overlap is below 1/2
/// yields [`Error::AmbiguousLabel`]. Other labels are simply left unassigned.
pub fn dressed_labels_requiring(
    eigenvectors: &CMatrix,
    n_t: usize,
    n_r: usize,
    required: &[Label],
) -> Result<DressedLabelMap> {
    let dim = n_t * n_r;
    if eigenvectors.nrows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: eigenvectors.nrows(),
        });
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(dim * dim);
    for e in 0..eigenvectors.ncols() {
        for b in 0..dim {
            let w = eigenvectors[(b, e)].norm_sqr();
            if w > 1e-3 {
                pairs.push((w, b, e));
            }
        }
    }
    pairs.sort_by(|x, y| {
        y.0.partial_cmp(&x.0)
            .unwrap_or(Ordering::Equal)
            .then(x.1.cmp(&y.1))
            .then(x.2.cmp(&y.2))
    });
    let mut index = vec![None; dim];
    let mut overlap = vec![0.0; dim];
    let mut taken = vec![false; eigenvectors.ncols()];
    for (w, b, e) in pairs {
        if index[b].is_none() && !taken[e] && w >= 0.5 {
            index[b] = Some(e);
            overlap[b] = w;
            taken[e] = true;
        }
    }
    for &(j, k) in required {
        let b = j * n_r + k;
        if b < dim && index[b].is_none() {
            let best = (0..eigenvectors.ncols())
                .map(|e| eigenvectors[(b, e)].norm_sqr())
                .fold(0.0, f64::max);
            return Err(Error::AmbiguousLabel {
                transmon: j,
                resonator: k,
                overlap: best,
            });
        }
    }
    Ok(DressedLabelMap {
        n_t,
        n_r,
        index,
        overlap,
    })
}

/// Diagonalized coupled system with dressed labels.
#[derive(Clone, Debug)]
pub struct DressedSpectrum {
    pub energies: Vec<f64>,
    pub vectors: CMatrix,
    pub labels: DressedLabelMap,
}

impl DressedSpectrum {
    pub fn of(system: &System) -> Result<Self> {
        let (energies, vectors) = eigensystem(system.h0())?;
        let labels = dressed_labels(&vectors, system.transmon_levels(), system.resonator_levels())?;
        Ok(DressedSpectrum {
            energies,
            vectors,
            labels,
        })
    }

    pub fn energy(&self, label: Label) -> Result<f64> {
        Ok(self.energies[self.labels.get(label)?])
    }

    /// Dressed qubit frequency E(1,0) − E(0,0).
    pub fn omega01(&self) -> Result<f64> {
        Ok(self.energy((1, 0))? - self.energy((0, 0))?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralFeatures {
    pub omega01: f64,
    /// ω₁₂ − ω₀₁; absent for the two-level model.
    pub anharmonicity: Option<f64>,
    /// [E(1,1) − E(1,0) − E(0,1) + E(0,0)] / 2; absent with a single resonator level.
    pub chi: Option<f64>,
}

pub fn features_of(spectrum: &DressedSpectrum, n_t: usize, n_r: usize) -> Result<SpectralFeatures> {
    let e00 = spectrum.energy((0, 0))?;
    let e10 = spectrum.energy((1, 0))?;
    let anharmonicity = if n_t >= 3 {
        Some(spectrum.energy((2, 0))? - 2.0 * e10 + e00)
    } else {
        None
    };
    let chi = if n_r >= 2 {
        let e01 = spectrum.energy((0, 1))?;
        let e11 = spectrum.energy((1, 1))?;
        Some(0.5 * (e11 - e10 - e01 + e00))
    } else {
        None
    };
    Ok(SpectralFeatures {
        omega01: e10 - e00,
        anharmonicity,
        chi,
    })
}

/// Dressed qubit frequency, anharmonicity and dispersive shift.
pub fn spectral_features(spec: &ModelSpec, params: &EnergyParams) -> Result<SpectralFeatures> {
    let system = System::build(spec, params)?;
    let spectrum = DressedSpectrum::of(&system)?;
    features_of(&spectrum, system.transmon_levels(), system.resonator_levels())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    /// 1 for a direct transition, k for a k-photon transition.
    pub photons: u32,
    /// Drive frequency (GHz) that addresses the transition.
    pub frequency: f64,
}

/// Single-photon ω_{j→k} and two-photon ω_{j→k}/2 drive frequencies for all
/// j < k ≤ `max_level`, from dressed energies with the resonator empty.
pub fn transition_frequencies(
    spec: &ModelSpec,
    params: &EnergyParams,
    max_level: usize,
) -> Result<Vec<Transition>> {
    let system = System::build(spec, params)?;
    if max_level >= system.transmon_levels() {
        return Err(invalid(
            "max_level",
            format!("must be below {} transmon levels", system.transmon_levels()),
        ));
    }
    let spectrum = DressedSpectrum::of(&system)?;
    let required: Vec<Label> = (0..=max_level).map(|j| (j, 0)).collect();
    let labels = dressed_labels_requiring(
        &spectrum.vectors,
        system.transmon_levels(),
        system.resonator_levels(),
        &required,
    )?;
    let energy = |j: usize| -> Result<f64> { Ok(spectrum.energies[labels.get((j, 0))?]) };
    let mut out = Vec::new();
    for from in 0..=max_level {
        for to in from + 1..=max_level {
            let w = energy(to)? - energy(from)?;
            out.push(Transition {
                from,
                to,
                photons: 1,
                frequency: w,
            });
            out.push(Transition {
                from,
                to,
                photons: 2,
                frequency: w / 2.0,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Hold the Rabi-family ω₀₁ = √(8E_C E_J) − E_C fixed.
    ConstantFreq,
    /// Hold E_C (the Rabi-family anharmonicity) fixed.
    ConstantAnharm,
}

/// Parameters at ratio multiplier `n_exp` relative to `base`.
pub fn sweep_params(mode: SweepMode, n_exp: f64, base: &EnergyParams) -> Result<EnergyParams> {
    if !(n_exp > 0.0) {
        return Err(invalid("n_exp", format!("must be positive, got {n_exp}")));
    }
    let r = base.ratio() * n_exp;
    if r <= 0.125 {
        return Err(invalid("n_exp", format!("E_J/E_C = {r} is at or below 1/8")));
    }
    let mut p = *base;
    match mode {
        SweepMode::ConstantFreq => {
            let target = base.rabi_frequency01();
            p.ec = target / ((8.0 * r).sqrt() - 1.0);
            p.ej = r * p.ec;
        }
        SweepMode::ConstantAnharm => {
            p.ej = r * p.ec;
        }
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub model: Variant,
    pub n_exp: f64,
    pub ec: f64,
    pub ej: f64,
    pub omega01: f64,
    pub anharmonicity: Option<f64>,
    pub chi: Option<f64>,
}

pub const DEFAULT_N_EXP: [f64; 7] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

/// Spectral features of every model at every ratio multiplier. Rows are
/// ordered by `n_exp` then by model, independent of scheduling.
pub fn ejc_sweep(
    mode: SweepMode,
    n_exp_values: &[f64],
    base: &EnergyParams,
    models: &[ModelSpec],
) -> Result<Vec<SweepRow>> {
    let points: Vec<(f64, EnergyParams)> = n_exp_values
        .iter()
        .map(|&n| sweep_params(mode, n, base).map(|p| (n, p)))
        .collect::<Result<_>>()?;
    let jobs: Vec<(f64, EnergyParams, ModelSpec)> = points
        .iter()
        .flat_map(|&(n, p)| models.iter().map(move |m| (n, p, *m)))
        .collect();
    jobs.par_iter()
        .map(|(n, p, m)| {
            let f = spectral_features(m, p)?;
            Ok(SweepRow {
                model: m.variant,
                n_exp: *n,
                ec: p.ec,
                ej: p.ej,
                omega01: f.omega01,
                anharmonicity: f.anharmonicity,
                chi: f.chi,
            })
        })
        .collect()
}

/// Measured spectral quantities used for parameter inversion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurements {
    pub omega01: f64,
    pub omega12: f64,
    pub chi: f64,
    pub omega_r: f64,
}

impl Measurements {
    pub fn from_features(f: &SpectralFeatures, omega_r: f64) -> Result<Self> {
        let alpha = f
            .anharmonicity
            .ok_or_else(|| invalid("anharmonicity", "required for inversion"))?;
        let chi = f.chi.ok_or_else(|| invalid("chi", "required for inversion"))?;
        Ok(Measurements {
            omega01: f.omega01,
            omega12: f.omega01 + alpha,
            chi,
            omega_r,
        })
    }
}

/// Rabi-family closed form: E_C = ω₀₁ − ω₁₂, E_J = (ω₀₁ + E_C)²/(8E_C),
/// g = √(−χ Δ(Δ − E_C)/E_C) with Δ = ω₀₁ − ω_r.
pub fn invert_closed_form(m: &Measurements) -> Result<EnergyParams> {
    let ec = m.omega01 - m.omega12;
    if !(ec > 0.0) {
        return Err(invalid("omega12", "ω₁₂ must lie below ω₀₁"));
    }
    let ej = (m.omega01 + ec).powi(2) / (8.0 * ec);
    let delta = m.omega01 - m.omega_r;
    let disc = -m.chi * delta * (delta - ec) / ec;
    if !(disc >= 0.0) {
        return Err(Error::NegativeDiscriminant {
            chi: m.chi,
            detuning: delta,
        });
    }
    Ok(EnergyParams {
        ec,
        ej,
        g: disc.sqrt(),
        omega_r: m.omega_r,
        ng: 0.0,
    })
}

pub const INVERSION_MAX_ITER: usize = 200;
pub const INVERSION_TOL: f64 = 1e-6;

/// Recovers (E_C, E_J, g) from measured ω₀₁, ω₁₂, χ.
///
/// GR and R use the closed form; CPB and the Duffing family refine it with
/// [`refine_parameters`].
pub fn invert_parameters(m: &Measurements, target: &ModelSpec) -> Result<EnergyParams> {
    let seed = invert_closed_form(m)?;
    match target.variant {
        Variant::Gr | Variant::R => Ok(seed),
        _ => refine_parameters(m, target, &seed),
    }
}

/// Damped Newton iteration on (E_C, E_J, g) so that the dressed features of
/// `target` reproduce the measurements. Frequencies converge to
/// [`INVERSION_TOL`] GHz and χ to the same relative tolerance. For the
/// two-level model, which has no anharmonicity, E_C stays at the seed value.
pub fn refine_parameters(
    m: &Measurements,
    target: &ModelSpec,
    seed: &EnergyParams,
) -> Result<EnergyParams> {
    let two_level = target.variant == Variant::R;
    let want_alpha = m.omega12 - m.omega01;
    let chi_scale = m.chi.abs().max(1e-12);

    let residual = |p: &EnergyParams| -> Result<Vec<f64>> {
        let f = spectral_features(target, p)?;
        let chi = f.chi.ok_or_else(|| invalid("resonator_levels", "need at least 2"))?;
        let mut r = vec![f.omega01 - m.omega01, (chi - m.chi) / chi_scale];
        if !two_level {
            let a = f.anharmonicity.ok_or_else(|| invalid("transmon_levels", "need at least 3"))?;
            r.push(a - want_alpha);
        }
        Ok(r)
    };
    let to_vec = |p: &EnergyParams| -> Vec<f64> {
        if two_level {
            vec![p.ej, p.g]
        } else {
            vec![p.ej, p.g, p.ec]
        }
    };
    let from_vec = |x: &[f64]| -> EnergyParams {
        let mut p = *seed;
        p.ej = x[0];
        p.g = x[1].abs();
        if !two_level {
            p.ec = x[2];
        }
        p
    };
    let converged = |r: &[f64]| r.iter().all(|v| v.abs() < INVERSION_TOL);
    let norm = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>().sqrt();

    let mut x = to_vec(seed);
    let mut r = residual(&from_vec(&x))?;
    for _ in 0..INVERSION_MAX_ITER {
        if converged(&r) {
            return Ok(from_vec(&x));
        }
        let n = x.len();
        let mut jac = nalgebra::DMatrix::<f64>::zeros(n, n);
        for c in 0..n {
            let h = 1e-6 * x[c].abs().max(1e-3);
            let mut xp = x.clone();
            xp[c] += h;
            let mut xm = x.clone();
            xm[c] -= h;
            let rp = residual(&from_vec(&xp))?;
            let rm = residual(&from_vec(&xm))?;
            for row in 0..n {
                jac[(row, c)] = (rp[row] - rm[row]) / (2.0 * h);
            }
        }
        let rhs = nalgebra::DVector::from_vec(r.iter().map(|v| -v).collect());
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or(Error::NoConvergence {
                iterations: 0,
                residual: norm(&r),
            })?;
        let mut lambda = 1.0;
        let base = norm(&r);
        loop {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + lambda * d).collect();
            let p = from_vec(&trial);
            if p.validate().is_ok() {
                if let Ok(rt) = residual(&p) {
                    if norm(&rt) < base || lambda < 1e-4 {
                        x = trial;
                        r = rt;
                        break;
                    }
                }
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                return Err(Error::NoConvergence {
                    iterations: INVERSION_MAX_ITER,
                    residual: base,
                });
            }
        }
    }
    if converged(&r) {
        Ok(from_vec(&x))
    } else {
        Err(Error::NoConvergence {
            iterations: INVERSION_MAX_ITER,
            residual: norm(&r),
        })
    }
}

/// Adjusts (E_J, E_C) of `seed` so the dressed ω₀₁ and anharmonicity of
/// `spec` equal the targets to within `tol` GHz. g and ω_r stay fixed.
pub fn match_frequency_anharmonicity(
    omega01: f64,
    anharmonicity: f64,
    spec: &ModelSpec,
    seed: &EnergyParams,
    tol: f64,
) -> Result<EnergyParams> {
    let residual = |x: [f64; 2]| -> Result<[f64; 2]> {
        let p = EnergyParams {
            ej: x[0],
            ec: x[1],
            ..*seed
        };
        p.validate()?;
        let f = spectral_features(spec, &p)?;
        let a = f
            .anharmonicity
            .ok_or_else(|| invalid("transmon_levels", "need at least 3"))?;
        Ok([f.omega01 - omega01, a - anharmonicity])
    };
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);
    let mut x = [seed.ej, seed.ec];
    let mut r = residual(x)?;
    for _ in 0..INVERSION_MAX_ITER {
        if r[0].abs() < tol && r[1].abs() < tol {
            return Ok(EnergyParams {
                ej: x[0],
                ec: x[1],
                ..*seed
            });
        }
        let mut jac = [[0.0; 2]; 2];
        for c in 0..2 {
            let h = 1e-6 * x[c].abs();
            let mut xp = x;
            xp[c] += h;
            let mut xm = x;
            xm[c] -= h;
            let (rp, rm) = (residual(xp)?, residual(xm)?);
            for row in 0..2 {
                jac[row][c] = (rp[row] - rm[row]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = [
            -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
        ];
        let base = norm(r);
        let mut lambda = 1.0;
        loop {
            let trial = [x[0] + lambda * dx[0], x[1] + lambda * dx[1]];
            if let Ok(rt) = residual(trial) {
                if norm(rt) < base {
                    x = trial;
                    r = rt;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                return Err(Error::NoConvergence {
                    iterations: INVERSION_MAX_ITER,
                    residual: base,
                });
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: INVERSION_MAX_ITER,
        residual: norm(r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_z() -> HermitianOperator {
        HermitianOperator::from_real_diagonal(&[1.0, -1.0])
    }

    #[test]
    fn gr_matches_duffing_spectrum() {
        let p = EnergyParams::REFERENCE;
        let target = spectral_features(&ModelSpec::default_for(Variant::Do3), &p).unwrap();
        let alpha = target.anharmonicity.unwrap();
        let gr = ModelSpec::default_for(Variant::Gr);
        let q = match_frequency_anharmonicity(target.omega01, alpha, &gr, &p, 1e-6).unwrap();
        let f = spectral_features(&gr, &q).unwrap();
        assert!((f.omega01 - target.omega01).abs() < 1e-6);
        assert!((f.anharmonicity.unwrap() - alpha).abs() < 1e-6);
        assert!((q.ec + alpha).abs() < 0.01 && q.g == p.g, "{q:?}");
    }

    #[test]
    fn pauli_z_spectrum() {
        let (e, v) = eigensystem(&sigma_z()).unwrap();
        assert_eq!(e, vec![-1.0, 1.0]);
        assert!((v[(1, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_spectrum_is_sorted_diagonal() {
        let h = HermitianOperator::from_real_diagonal(&[3.0, -2.0, 7.5, 0.0]);
        assert_eq!(eigenvalues(&h).unwrap(), vec![-2.0, 0.0, 3.0, 7.5]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(0.0, 1.0);
        m[(1, 0)] = C64::new(0.0, 1.0);
        assert!(matches!(eigensystem_of(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn uncoupled_labels_are_identity() {
        let p = EnergyParams::REFERENCE.with_g(0.0);
        let sys = System::build(&ModelSpec::default_for(Variant::Gr), &p).unwrap();
        let s = DressedSpectrum::of(&sys).unwrap();
        for (j, k) in s.labels.labels().collect::<Vec<_>>() {
            let e = s.labels.get((j, k)).unwrap();
            assert!((s.vectors[(sys.bare_index(j, k), e)].norm_sqr() - 1.0).abs() < 1e-12);
            assert!((s.labels.overlap((j, k)).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(s.labels.labels().count(), sys.dim());
    }

    #[test]
    fn unknown_label_is_an_error() {
        let sys = System::build(&ModelSpec::default_for(Variant::R), &EnergyParams::REFERENCE).unwrap();
        let s = DressedSpectrum::of(&sys).unwrap();
        assert!(matches!(s.labels.get((2, 0)), Err(Error::UnknownLabel { .. })));
    }

    #[test]
    fn gr_transitions() {
        let p = EnergyParams::REFERENCE.with_g(0.0);
        let t = transition_frequencies(&ModelSpec::default_for(Variant::Gr), &p, 3).unwrap();
        let find = |f, to, ph| {
            t.iter()
                .find(|x| x.from == f && x.to == to && x.photons == ph)
                .unwrap()
                .frequency
        };
        let w01 = find(0, 1, 1);
        assert!((find(1, 2, 1) - w01 + 0.348).abs() < 1e-12);
        assert!((find(0, 2, 2) - (w01 - 0.348 / 2.0)).abs() < 1e-12);
        assert!(transition_frequencies(&ModelSpec::default_for(Variant::Gr), &p, 6).is_err());
    }

    #[test]
    fn sweep_params_modes() {
        let base = EnergyParams::REFERENCE;
        for n in DEFAULT_N_EXP {
            let p = sweep_params(SweepMode::ConstantFreq, n, &base).unwrap();
            assert!((p.rabi_frequency01() - base.rabi_frequency01()).abs() < 1e-9);
            assert!((p.ratio() - base.ratio() * n).abs() < 1e-9 * n);
            let q = sweep_params(SweepMode::ConstantAnharm, n, &base).unwrap();
            assert_eq!(q.ec, base.ec);
        }
        assert!(sweep_params(SweepMode::ConstantFreq, 0.0, &base).is_err());
        assert!(sweep_params(SweepMode::ConstantFreq, 0.1 / base.ratio(), &base).is_err());
    }

    #[test]
    fn closed_form_inversion_is_exact() {
        let p = EnergyParams::REFERENCE;
        let w01 = p.rabi_frequency01();
        let delta = w01 - p.omega_r;
        let chi = -p.g * p.g * p.ec / (delta * (delta - p.ec));
        let m = Measurements {
            omega01: w01,
            omega12: w01 - p.ec,
            chi,
            omega_r: p.omega_r,
        };
        let q = invert_parameters(&m, &ModelSpec::default_for(Variant::Gr)).unwrap();
        assert!((q.ec - p.ec).abs() < 1e-10);
        assert!((q.ej - p.ej).abs() < 1e-10);
        assert!((q.g - p.g).abs() < 1e-10);
    }

    #[test]
    fn wrong_sign_chi_has_negative_discriminant() {
        let m = Measurements {
            omega01: 4.97,
            omega12: 4.62,
            chi: 3e-5,
            omega_r: 6.99,
        };
        assert!(matches!(
            invert_closed_form(&m),
            Err(Error::NegativeDiscriminant { .. })
        ));
    }
}
