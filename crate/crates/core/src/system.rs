//! Coupled transmon–resonator systems expressed in the uncoupled transmon
//! eigenbasis ⊗ resonator Fock basis.
//!
//! The raw operators from [`crate::model`] are rotated into the eigenbasis of
//! the uncoupled transmon, keeping the lowest `transmon_levels` eigenstates.
//! Bare product states |j, k⟩ are then simply basis vectors, with index
//! `j * n_r + k`.

use log::warn;
use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::model::{
    self, assemble_coupled, CMatrix, EnergyParams, HermitianOperator, ModelSpec, Variant,
};
use crate::spectra::eigensystem;

#[derive(Clone, Debug)]
pub struct System {
    spec: ModelSpec,
    params: EnergyParams,
    transmon_energies: Vec<f64>,
    h0: HermitianOperator,
    drive: HermitianOperator,
}

impl System {
    pub fn build(spec: &ModelSpec, params: &EnergyParams) -> Result<Self> {
        spec.validate()?;
        params.validate()?;
        if spec.variant == Variant::Cpb {
            let drift = model::charge_cutoff_drift(params, spec.charge_cutoff)?;
            if drift > model::CUTOFF_DRIFT_WARNING {
                warn!(
                    "charge cutoff {} drifts by {drift:.2e} GHz against a larger cutoff",
                    spec.charge_cutoff
                );
            }
        }
        let raw = model::build_transmon(spec, params)?;
        let coupling = model::transmon_coupling_factor(spec, params);
        let drive = model::transmon_drive_factor(spec, params);
        Self::from_raw(*spec, *params, &raw, &coupling, &drive, spec.transmon_levels)
    }

    /// CPB on the charge window n ∈ [lo, hi], keeping every eigenstate. Used
    /// by the truncation convergence scan.
    pub fn cpb_window(
        params: &EnergyParams,
        lo: i64,
        hi: i64,
        resonator_levels: usize,
    ) -> Result<Self> {
        let raw = model::charge_window(params.ec, params.ej, params.ng, lo, hi);
        let n = model::charge_operator_window(lo, hi);
        let coupling = model::cpb_coupling_factor(n.clone(), params);
        let dim = raw.dim();
        let spec = ModelSpec {
            variant: Variant::Cpb,
            charge_cutoff: hi.max(-lo) as usize,
            transmon_levels: dim,
            resonator_levels,
        };
        Self::from_raw(spec, *params, &raw, &coupling, &n, dim)
    }

    fn from_raw(
        spec: ModelSpec,
        params: EnergyParams,
        raw: &HermitianOperator,
        coupling: &CMatrix,
        drive: &CMatrix,
        keep: usize,
    ) -> Result<Self> {
        let (energies, vectors) = eigensystem(raw)?;
        let mut u = vectors.columns(0, keep).into_owned();
        fix_drive_gauge(&mut u, drive);
        let transmon_energies: Vec<f64> = energies[..keep].to_vec();
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(keep, |i, _| {
            C64::new(transmon_energies[i], 0.0)
        }));
        let coupling_t = u.adjoint() * coupling * &u;
        let drive_t = HermitianOperator::from_hermitian_parts(u.adjoint() * drive * &u);
        let h0 = assemble_coupled(
            &diag,
            &coupling_t,
            params.g,
            params.omega_r,
            spec.resonator_levels,
        );
        let id_r = CMatrix::identity(spec.resonator_levels, spec.resonator_levels);
        let drive = HermitianOperator::from_hermitian_parts(drive_t.matrix().kronecker(&id_r));
        Ok(System {
            spec: ModelSpec {
                transmon_levels: keep,
                ..spec
            },
            params,
            transmon_energies,
            h0,
            drive,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn params(&self) -> &EnergyParams {
        &self.params
    }

    /// Uncoupled transmon eigenenergies (GHz), ascending.
    pub fn transmon_energies(&self) -> &[f64] {
        &self.transmon_energies
    }

    pub fn h0(&self) -> &HermitianOperator {
        &self.h0
    }

    pub fn drive(&self) -> &HermitianOperator {
        &self.drive
    }

    pub fn transmon_levels(&self) -> usize {
        self.spec.transmon_levels
    }

    pub fn resonator_levels(&self) -> usize {
        self.spec.resonator_levels
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn bare_index(&self, transmon: usize, resonator: usize) -> usize {
        transmon * self.spec.resonator_levels + resonator
    }
}

/// Rephases the eigenvectors so that every nearest-neighbour drive element
/// ⟨j|D|j+1⟩ is negative imaginary, matching i(b† − b). Models then share one
/// phase convention and their states can be compared component by component.
fn fix_drive_gauge(u: &mut CMatrix, drive: &CMatrix) {
    let d = u.adjoint() * drive * &*u;
    let mut phase = C64::new(1.0, 0.0);
    for j in 0..u.ncols().saturating_sub(1) {
        let x = d[(j, j + 1)];
        let r = x.norm();
        phase = if r > 1e-12 {
            phase * C64::new(0.0, -1.0) * x.conj() / r
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = u.column_mut(j + 1);
        col *= phase;
    }
}
