//! Hamiltonian construction for the transmon model hierarchy.
//!
//! Every energy is stored as an ordinary frequency in GHz (E/2π). The factor
//! 2π is applied only inside the propagator.
//!
//! Transmon variants, from most to least faithful:
//!
//! | variant | transmon part                                        | resonator coupling        |
//! |---------|------------------------------------------------------|---------------------------|
//! | `Cpb`   | 4E_C(n − n_g)² − E_J cos φ in the charge basis        | g n ⊗ (a + a†)            |
//! | `Do2`   | harmonic + quartic cosine term                       | i g (b† − b) ⊗ (a + a†)   |
//! | `Do3`   | harmonic + quartic + sextic cosine terms             | i g (b† − b) ⊗ (a + a†)   |
//! | `Gr3`   | diagonal, quartic and sextic first-order energies    | i g (b† − b) ⊗ (a + a†)   |
//! | `Gr`    | diagonal, quartic first-order energies               | g (b† + b) ⊗ (a + a†)     |
//! | `R`     | two-level, ω₀₁ σ_z / 2                               | g σ_x ⊗ (a + a†)          |

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type CMatrix = DMatrix<C64>;

/// Smallest charge cutoff accepted for production CPB operators.
pub const MIN_CHARGE_CUTOFF: usize = 10;
/// Default CPB charge cutoff.
pub const DEFAULT_CHARGE_CUTOFF: usize = 30;
/// Cutoff used to cross-check the default one.
pub const CHECK_CHARGE_CUTOFF: usize = 40;
/// Eigenvalue drift (GHz) between the two cutoffs above which a warning is logged.
pub const CUTOFF_DRIFT_WARNING: f64 = 1e-8;

const HERMITIAN_TOL: f64 = 1e-12;

/// Device energies, all in GHz (E/2π), plus the dimensionless offset charge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyParams {
    pub ec: f64,
    pub ej: f64,
    pub g: f64,
    pub omega_r: f64,
    #[serde(default)]
    pub ng: f64,
}

impl EnergyParams {
    /// Reference device: E_C = 0.348, E_J = 10.158, g = 0.02, ω_r = 6.99 GHz.
    pub const REFERENCE: EnergyParams = EnergyParams {
        ec: 0.348,
        ej: 10.158,
        g: 0.02,
        omega_r: 6.99,
        ng: 0.0,
    };

    pub fn new(ec: f64, ej: f64, g: f64, omega_r: f64) -> Result<Self> {
        let p = EnergyParams {
            ec,
            ej,
            g,
            omega_r,
            ng: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ec > 0.0) || !self.ec.is_finite() {
            return Err(invalid("ec", format!("must be positive, got {}", self.ec)));
        }
        if !(self.ej > 0.0) || !self.ej.is_finite() {
            return Err(invalid("ej", format!("must be positive, got {}", self.ej)));
        }
        if !(self.omega_r > 0.0) || !self.omega_r.is_finite() {
            return Err(invalid(
                "omega_r",
                format!("must be positive, got {}", self.omega_r),
            ));
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(invalid("g", format!("must be non-negative, got {}", self.g)));
        }
        if !self.ng.is_finite() {
            return Err(invalid("ng", "must be finite"));
        }
        Ok(())
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_ng(mut self, ng: f64) -> Self {
        self.ng = ng;
        self
    }

    /// E_J / E_C.
    pub fn ratio(&self) -> f64 {
        self.ej / self.ec
    }

    /// √(8 E_C E_J), the harmonic level spacing.
    pub fn plasma_frequency(&self) -> f64 {
        (8.0 * self.ec * self.ej).sqrt()
    }

    /// Closed-form Rabi-family qubit frequency √(8 E_C E_J) − E_C.
    pub fn rabi_frequency01(&self) -> f64 {
        self.plasma_frequency() - self.ec
    }

    pub fn eta(&self) -> Eta {
        Eta(Eta::value_for(self.ec, self.ej))
    }
}

/// Zero-point phase scale η = √(2 E_C / E_J).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eta(f64);

impl Eta {
    pub fn new(ec: f64, ej: f64) -> Result<Self> {
        if !(ec > 0.0) {
            return Err(invalid("ec", "must be positive"));
        }
        if !(ej > 0.0) {
            return Err(invalid("ej", "must be positive"));
        }
        Ok(Eta(Self::value_for(ec, ej)))
    }

    fn value_for(ec: f64, ej: f64) -> f64 {
        (2.0 * ec / ej).sqrt()
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Prefactor 1/(2√η) of the charge operator in the oscillator basis.
    pub fn charge_prefactor(self) -> f64 {
        0.5 / self.0.sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Cpb,
    Do2,
    Do3,
    Gr,
    Gr3,
    R,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Cpb,
        Variant::Do2,
        Variant::Do3,
        Variant::Gr,
        Variant::Gr3,
        Variant::R,
    ];

    /// The four principal models.
    pub const HIERARCHY: [Variant; 4] = [Variant::Cpb, Variant::Do3, Variant::Gr, Variant::R];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Cpb => "cpb",
            Variant::Do2 => "do2",
            Variant::Do3 => "do3",
            Variant::Gr => "gr",
            Variant::Gr3 => "gr3",
            Variant::R => "r",
        }
    }

    /// Transmon levels needed for converged driven dynamics at the reference
    /// parameters (see [`crate::propagator::convergence_dimension`]).
    pub fn default_levels(self) -> usize {
        match self {
            Variant::Cpb => 13,
            Variant::Do2 | Variant::Do3 => 12,
            Variant::Gr | Variant::Gr3 => 6,
            Variant::R => 2,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cpb" => Ok(Variant::Cpb),
            "do2" => Ok(Variant::Do2),
            "do3" => Ok(Variant::Do3),
            "gr" => Ok(Variant::Gr),
            "gr3" => Ok(Variant::Gr3),
            "r" => Ok(Variant::R),
            other => Err(invalid("model", format!("unknown model `{other}`"))),
        }
    }
}

/// Which Hamiltonian to build and how large its basis is.
///
/// For the CPB, `charge_cutoff` fixes the charge basis (n ∈ [−N_c, N_c]) and
/// `transmon_levels` is the number of CPB eigenstates kept for dynamics. For
/// every other variant `transmon_levels` is the oscillator truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub variant: Variant,
    pub charge_cutoff: usize,
    pub transmon_levels: usize,
    pub resonator_levels: usize,
}

impl ModelSpec {
    pub fn new(variant: Variant, transmon_levels: usize, resonator_levels: usize) -> Result<Self> {
        let spec = ModelSpec {
            variant,
            charge_cutoff: DEFAULT_CHARGE_CUTOFF,
            transmon_levels: if variant == Variant::R { 2 } else { transmon_levels },
            resonator_levels,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Default dimensions with three resonator levels.
    pub fn default_for(variant: Variant) -> Self {
        ModelSpec {
            variant,
            charge_cutoff: DEFAULT_CHARGE_CUTOFF,
            transmon_levels: variant.default_levels(),
            resonator_levels: 3,
        }
    }

    pub fn with_charge_cutoff(mut self, n_c: usize) -> Self {
        self.charge_cutoff = n_c;
        self
    }

    pub fn with_transmon_levels(mut self, n_t: usize) -> Self {
        if self.variant != Variant::R {
            self.transmon_levels = n_t;
        }
        self
    }

    pub fn with_resonator_levels(mut self, n_r: usize) -> Self {
        self.resonator_levels = n_r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.resonator_levels < 1 {
            return Err(invalid("resonator_levels", "must be at least 1"));
        }
        if self.transmon_levels < 1 {
            return Err(invalid("transmon_levels", "must be at least 1"));
        }
        match self.variant {
            Variant::R if self.transmon_levels != 2 => {
                Err(invalid("transmon_levels", "the R model has exactly two levels"))
            }
            Variant::Cpb if self.charge_cutoff < MIN_CHARGE_CUTOFF => Err(invalid(
                "charge_cutoff",
                format!("must be at least {MIN_CHARGE_CUTOFF}"),
            )),
            Variant::Cpb if self.transmon_levels > 2 * self.charge_cutoff + 1 => Err(invalid(
                "transmon_levels",
                "exceeds the charge basis dimension",
            )),
            _ => Ok(()),
        }
    }

    /// Dimension of the transmon factor before any eigenbasis truncation.
    pub fn raw_transmon_dim(&self) -> usize {
        match self.variant {
            Variant::Cpb => 2 * self.charge_cutoff + 1,
            Variant::R => 2,
            _ => self.transmon_levels,
        }
    }

    /// Dimension of the coupled transmon ⊗ resonator space used for dynamics.
    pub fn dim(&self) -> usize {
        self.transmon_levels * self.resonator_levels
    }
}

/// Dense Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
}

impl HermitianOperator {
    /// Wraps `mat`, rejecting it unless it equals its conjugate transpose to
    /// 10⁻¹² relative.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                found: mat.ncols(),
            });
        }
        let residual = hermiticity_residual(&mat);
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        Ok(HermitianOperator { mat })
    }

    /// Symmetrizes away rounding noise; only for matrices Hermitian by construction.
    pub(crate) fn from_hermitian_parts(mat: CMatrix) -> Self {
        let sym = (&mat + mat.adjoint()) * C64::new(0.5, 0.0);
        HermitianOperator { mat: sym }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut mat = CMatrix::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            mat[(i, i)] = C64::new(*d, 0.0);
        }
        HermitianOperator { mat }
    }

    pub fn identity(n: usize) -> Self {
        HermitianOperator {
            mat: CMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn residual(&self) -> f64 {
        hermiticity_residual(&self.mat)
    }

    pub fn kron(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            mat: self.mat.kronecker(&other.mat),
        }
    }

    pub fn scaled(&self, s: f64) -> HermitianOperator {
        HermitianOperator {
            mat: &self.mat * C64::new(s, 0.0),
        }
    }

    pub fn trace(&self) -> f64 {
        self.mat.diagonal().iter().map(|z| z.re).sum()
    }

    /// U† A U for an isometry U (columns orthonormal).
    pub fn transformed(&self, u: &CMatrix) -> HermitianOperator {
        HermitianOperator::from_hermitian_parts(u.adjoint() * &self.mat * u)
    }
}

impl std::ops::Add for &HermitianOperator {
    type Output = HermitianOperator;

    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

/// ‖A − A†‖_F / max(‖A‖_F, 1).
pub fn hermiticity_residual(mat: &CMatrix) -> f64 {
    let diff = (mat - mat.adjoint()).norm();
    diff / mat.norm().max(1.0)
}

/// Truncated annihilation operator on `n` levels.
pub fn annihilation(n: usize) -> CMatrix {
    let mut a = CMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    a
}

fn number_operator(n: usize) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |k, _| C64::new(k as f64, 0.0)))
}

/// b + b† on `n` levels.
fn position_quadrature(n: usize) -> CMatrix {
    let a = annihilation(n);
    &a + a.adjoint()
}

/// i(b† − b) on `n` levels.
fn momentum_quadrature(n: usize) -> CMatrix {
    let a = annihilation(n);
    (a.adjoint() - &a) * C64::new(0.0, 1.0)
}

/// Charge-basis Cooper-pair-box Hamiltonian on n ∈ [−n_c, n_c].
pub fn build_transmon_charge(params: &EnergyParams, n_c: usize) -> Result<HermitianOperator> {
    if n_c < MIN_CHARGE_CUTOFF {
        return Err(invalid(
            "charge_cutoff",
            format!("must be at least {MIN_CHARGE_CUTOFF}, got {n_c}"),
        ));
    }
    if !(params.ec > 0.0) {
        return Err(invalid("ec", "must be positive"));
    }
    if !(params.ej > 0.0) {
        return Err(invalid("ej", "must be positive"));
    }
    let lo = -(n_c as i64);
    let hi = n_c as i64;
    Ok(charge_window(params.ec, params.ej, params.ng, lo, hi))
}

/// Charge-basis CPB Hamiltonian on the window n ∈ [lo, hi] with no cutoff
/// guard. Used by the truncation convergence scan, which deliberately probes
/// windows below the production minimum.
pub(crate) fn charge_window(ec: f64, ej: f64, ng: f64, lo: i64, hi: i64) -> HermitianOperator {
    let dim = (hi - lo + 1) as usize;
    let mut mat = CMatrix::zeros(dim, dim);
    for (i, n) in (lo..=hi).enumerate() {
        let q = n as f64 - ng;
        mat[(i, i)] = C64::new(4.0 * ec * q * q, 0.0);
        if i + 1 < dim {
            mat[(i, i + 1)] = C64::new(-0.5 * ej, 0.0);
            mat[(i + 1, i)] = C64::new(-0.5 * ej, 0.0);
        }
    }
    HermitianOperator { mat }
}

/// Charge operator n on the window n ∈ [lo, hi].
pub(crate) fn charge_operator_window(lo: i64, hi: i64) -> CMatrix {
    let dim = (hi - lo + 1) as usize;
    CMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |i, _| {
        C64::new((lo + i as i64) as f64, 0.0)
    }))
}

/// Charge operator n in the charge basis [−n_c, n_c].
pub fn charge_operator(n_c: usize) -> CMatrix {
    charge_operator_window(-(n_c as i64), n_c as i64)
}

/// Duffing-oscillator transmon truncated at order 2K of the cosine expansion.
///
/// K = 2: √(8E_C E_J)(b†b + ½) − E_J − (E_C/12)(b + b†)⁴
/// K = 3: the above + (E_J/720)(2E_C/E_J)^{3/2}(b + b†)⁶
///
/// Ladder operators are truncated to `n_t` levels before the powers are taken.
pub fn build_duffing(params: &EnergyParams, order_k: u32, n_t: usize) -> Result<HermitianOperator> {
    duffing_terms(params, order_k, n_t, true)
}

pub(crate) fn duffing_terms(
    params: &EnergyParams,
    order_k: u32,
    n_t: usize,
    anharmonic: bool,
) -> Result<HermitianOperator> {
    if !(2..=3).contains(&order_k) {
        return Err(invalid("order_k", format!("must be 2 or 3, got {order_k}")));
    }
    if n_t < 3 {
        return Err(invalid("transmon_levels", format!("must be at least 3, got {n_t}")));
    }
    let wp = params.plasma_frequency();
    let num = number_operator(n_t);
    let mut h = (num + CMatrix::identity(n_t, n_t) * C64::new(0.5, 0.0)) * C64::new(wp, 0.0)
        - CMatrix::identity(n_t, n_t) * C64::new(params.ej, 0.0);
    if anharmonic {
        let x = position_quadrature(n_t);
        let x2 = &x * &x;
        let x4 = &x2 * &x2;
        h -= &x4 * C64::new(params.ec / 12.0, 0.0);
        if order_k == 3 {
            let x6 = &x4 * &x2;
            h += x6 * C64::new(sextic_prefactor(params), 0.0);
        }
    }
    Ok(HermitianOperator::from_hermitian_parts(h))
}

/// (E_J/720)(2E_C/E_J)^{3/2}.
fn sextic_prefactor(params: &EnergyParams) -> f64 {
    params.ej / 720.0 * (2.0 * params.ec / params.ej).powf(1.5)
}

/// First-order quartic energy correction −(E_C/12)(6m² + 6m + 3).
pub fn quartic_correction(params: &EnergyParams, m: usize) -> f64 {
    let m = m as f64;
    -params.ec / 12.0 * (6.0 * m * m + 6.0 * m + 3.0)
}

/// First-order sextic energy correction (E_J/720)(2E_C/E_J)^{3/2}(20m³ + 30m² + 40m + 15).
pub fn sextic_correction(params: &EnergyParams, m: usize) -> f64 {
    let m = m as f64;
    sextic_prefactor(params) * (20.0 * m * m * m + 30.0 * m * m + 40.0 * m + 15.0)
}

/// Diagonal perturbative transmon: `Gr` keeps the quartic correction, `Gr3`
/// adds the sextic one.
pub fn build_gr(params: &EnergyParams, variant: Variant, n_t: usize) -> Result<HermitianOperator> {
    if !matches!(variant, Variant::Gr | Variant::Gr3) {
        return Err(invalid("variant", "expected gr or gr3"));
    }
    if n_t < 3 {
        return Err(invalid("transmon_levels", format!("must be at least 3, got {n_t}")));
    }
    Ok(HermitianOperator::from_real_diagonal(&gr_levels(params, variant, n_t)))
}

pub(crate) fn gr_levels(params: &EnergyParams, variant: Variant, n_t: usize) -> Vec<f64> {
    let wp = params.plasma_frequency();
    (0..n_t)
        .map(|m| {
            let mut e = wp * (m as f64 + 0.5) - params.ej + quartic_correction(params, m);
            if variant == Variant::Gr3 {
                e += sextic_correction(params, m);
            }
            e
        })
        .collect()
}

/// Two-level Rabi transmon (√(8E_C E_J) − E_C) σ_z/2, ordered (|0⟩, |1⟩) with
/// σ_z = |1⟩⟨1| − |0⟩⟨0| so that index 0 is the ground state.
pub fn build_r(params: &EnergyParams) -> HermitianOperator {
    let w = params.rabi_frequency01();
    HermitianOperator::from_real_diagonal(&[-0.5 * w, 0.5 * w])
}

/// Uncoupled transmon Hamiltonian for `spec`, in its raw basis.
pub fn build_transmon(spec: &ModelSpec, params: &EnergyParams) -> Result<HermitianOperator> {
    match spec.variant {
        Variant::Cpb => build_transmon_charge(params, spec.charge_cutoff),
        Variant::Do2 => build_duffing(params, 2, spec.transmon_levels),
        Variant::Do3 => build_duffing(params, 3, spec.transmon_levels),
        Variant::Gr | Variant::Gr3 => build_gr(params, spec.variant, spec.transmon_levels),
        Variant::R => Ok(build_r(params)),
    }
}

/// Transmon factor of the resonator coupling term (without g), raw basis.
///
/// The oscillator variants carry g with the number-operator prefactor 1/(2√η)
/// absorbed, so the CPB couples through 2√η·n̂ to describe the same device.
pub fn transmon_coupling_factor(spec: &ModelSpec, params: &EnergyParams) -> CMatrix {
    match spec.variant {
        Variant::Cpb => cpb_coupling_factor(charge_operator(spec.charge_cutoff), params),
        Variant::Do2 | Variant::Do3 | Variant::Gr3 => momentum_quadrature(spec.transmon_levels),
        Variant::Gr => position_quadrature(spec.transmon_levels),
        Variant::R => position_quadrature(2),
    }
}

pub(crate) fn cpb_coupling_factor(n: CMatrix, params: &EnergyParams) -> CMatrix {
    n * C64::new(1.0 / params.eta().charge_prefactor(), 0.0)
}

/// Transmon factor of the drive operator, raw basis: n for the CPB and
/// (i/2√η)(b† − b) for the oscillator-basis variants.
pub fn transmon_drive_factor(spec: &ModelSpec, params: &EnergyParams) -> CMatrix {
    match spec.variant {
        Variant::Cpb => charge_operator(spec.charge_cutoff),
        _ => {
            let n = spec.raw_transmon_dim();
            momentum_quadrature(n) * C64::new(params.eta().charge_prefactor(), 0.0)
        }
    }
}

/// transmon ⊗ 1 + 1 ⊗ ω_r a†a + g · coupling ⊗ (a + a†).
pub(crate) fn assemble_coupled(
    transmon_h: &CMatrix,
    coupling: &CMatrix,
    g: f64,
    omega_r: f64,
    n_r: usize,
) -> HermitianOperator {
    let n_t = transmon_h.nrows();
    let id_t = CMatrix::identity(n_t, n_t);
    let id_r = CMatrix::identity(n_r, n_r);
    let resonator = number_operator(n_r) * C64::new(omega_r, 0.0);
    let field = position_quadrature(n_r);
    let mut h = transmon_h.kronecker(&id_r) + id_t.kronecker(&resonator);
    if g != 0.0 {
        h += coupling.kronecker(&field) * C64::new(g, 0.0);
    }
    HermitianOperator::from_hermitian_parts(h)
}

/// Couples an uncoupled transmon operator (raw basis of `spec`) to an
/// `N_r`-level resonator.
pub fn couple_with_resonator(
    transmon_h: &HermitianOperator,
    spec: &ModelSpec,
    params: &EnergyParams,
) -> Result<HermitianOperator> {
    if spec.resonator_levels < 1 {
        return Err(invalid("resonator_levels", "must be at least 1"));
    }
    let expected = spec.raw_transmon_dim();
    if transmon_h.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: transmon_h.dim(),
        });
    }
    let coupling = transmon_coupling_factor(spec, params);
    Ok(assemble_coupled(
        transmon_h.matrix(),
        &coupling,
        params.g,
        params.omega_r,
        spec.resonator_levels,
    ))
}

/// Drive operator on the raw transmon basis, tensored with the resonator identity.
pub fn build_drive_operator(spec: &ModelSpec, params: &EnergyParams) -> HermitianOperator {
    let d = transmon_drive_factor(spec, params);
    let id_r = CMatrix::identity(spec.resonator_levels, spec.resonator_levels);
    HermitianOperator::from_hermitian_parts(d.kronecker(&id_r))
}

/// Largest drift among the lowest ten CPB eigenvalues between cutoffs `n_c`
/// and [`CHECK_CHARGE_CUTOFF`] (or `n_c + 10` if larger).
pub fn charge_cutoff_drift(params: &EnergyParams, n_c: usize) -> Result<f64> {
    let big = CHECK_CHARGE_CUTOFF.max(n_c + 10);
    let a = crate::spectra::eigenvalues(&build_transmon_charge(params, n_c)?)?;
    let b = crate::spectra::eigenvalues(&build_transmon_charge(params, big)?)?;
    Ok(a.iter()
        .zip(&b)
        .take(10)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}
