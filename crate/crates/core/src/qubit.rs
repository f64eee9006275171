//! Two qubits driven by the correlated amplifier output.
//!
//! Each qubit sits at one of the two mode frequencies and relaxes into its
//! own bath; the baths share the amplifier's thermal occupations and
//! anomalous correlation, so the cross terms of the Lindblad generator can
//! pump the pair into an entangled steady state. Everything is small enough
//! to handle exactly: the generator is a 16x16 matrix acting on the
//! column-stacked density matrix, its null space is the steady state, and
//! concurrence comes from the standard spin-flip construction.

use nalgebra::{Matrix2, Matrix4, SMatrix, SVector, SymmetricEigen};
use num_complex::Complex64;

use crate::gaussian::Moments;
use crate::lumped::LumpedConfig;
use crate::{Error, Result};

type C64 = Complex64;
type M4 = Matrix4<C64>;

/// Lindblad generator in the column-stacked (`vec`) representation, basis
/// ordering `{gg, ge, eg, ee}`.
pub type Superoperator = SMatrix<C64, 16, 16>;

/// Relaxation rates and bath moments seen by the two qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    pub gamma1: f64,
    pub gamma2: f64,
    /// Thermal occupation at the first qubit's frequency.
    pub n1: f64,
    /// Thermal occupation at the second qubit's frequency.
    pub n2: f64,
    /// Anomalous bath correlation (real in the gauge of the driving field).
    pub m: f64,
}

impl BathParams {
    pub fn new(gamma1: f64, gamma2: f64, n1: f64, n2: f64, m: f64) -> Result<Self> {
        if !(gamma1 > 0.0) || !(gamma2 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "relaxation rates must be positive: {gamma1}, {gamma2}"
            )));
        }
        // The bath moments must form a physical two-mode state.
        Moments::new(n1, n2, C64::new(m, 0.0))?.to_th_tmss()?;
        Ok(Self {
            gamma1,
            gamma2,
            n1,
            n2,
            m,
        })
    }

    /// Baths fed by the beamsplitter-loss amplifier output, with unit
    /// relaxation rates.
    pub fn from_lumped(config: &LumpedConfig) -> Self {
        let out = config.output_moments();
        Self {
            gamma1: 1.0,
            gamma2: 1.0,
            n1: out.n_signal,
            n2: out.n_idler,
            m: out.anomalous.re,
        }
    }
}

/// `vec(A rho B)` as a matrix on `vec(rho)`: `B^T kron A`.
fn sandwich(a: &M4, b: &M4) -> Superoperator {
    b.transpose().kronecker(a)
}

/// `vec(X rho + rho X)`.
fn anticommutator(x: &M4) -> Superoperator {
    let i4 = M4::identity();
    i4.kronecker(x) + x.transpose().kronecker(&i4)
}

/// Standard dissipator `D[x] rho = x rho x† - {x†x, rho}/2`.
fn dissipator(x: &M4) -> Superoperator {
    let xdx = x.adjoint() * x;
    sandwich(x, &x.adjoint()) - anticommutator(&xdx) * C64::new(0.5, 0.0)
}

/// Lindblad generator of the two-qubit pair in the correlated bath.
///
/// Local terms are the usual thermal dissipators at rates
/// `gamma_i (1 + N_i)` (decay) and `gamma_i N_i` (excitation); the bath
/// correlation `M` adds the two-qubit cross terms
/// `-sqrt(gamma1 gamma2) M (S[sp1, sp2] + S[sm1, sm2])` with
/// `S[x, y] rho = x rho y + y rho x - {x y, rho}`.
pub fn liouvillian(bath: &BathParams) -> Superoperator {
    let i2 = Matrix2::<C64>::identity();
    let one = C64::new(1.0, 0.0);
    let lower = Matrix2::<C64>::new(C64::ZERO, one, C64::ZERO, C64::ZERO);
    let raise = lower.adjoint();
    let sm1 = lower.kronecker(&i2);
    let sm2 = i2.kronecker(&lower);
    let sp1 = raise.kronecker(&i2);
    let sp2 = i2.kronecker(&raise);

    let scale = |v: f64| C64::new(v, 0.0);
    let mut gen = dissipator(&sm1) * scale(bath.gamma1 * (1.0 + bath.n1))
        + dissipator(&sp1) * scale(bath.gamma1 * bath.n1)
        + dissipator(&sm2) * scale(bath.gamma2 * (1.0 + bath.n2))
        + dissipator(&sp2) * scale(bath.gamma2 * bath.n2);

    let cross_up = sandwich(&sp1, &sp2) + sandwich(&sp2, &sp1) - anticommutator(&(sp1 * sp2));
    let cross_dn = sandwich(&sm2, &sm1) + sandwich(&sm1, &sm2) - anticommutator(&(sm1 * sm2));
    gen -= (cross_up + cross_dn) * scale((bath.gamma1 * bath.gamma2).sqrt() * bath.m);
    gen
}

/// Applies a superoperator to a density matrix (vec, multiply, unstack).
pub fn apply_superoperator(gen: &Superoperator, rho: &M4) -> M4 {
    let vec = SVector::<C64, 16>::from_iterator(rho.iter().copied());
    let out = gen * vec;
    M4::from_iterator(out.iter().copied())
}

/// Validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    rho: M4,
}

impl TwoQubitState {
    /// Accepts a matrix that is Hermitian, unit-trace and positive up to
    /// tight numerical slack.
    pub fn new(rho: M4) -> Result<Self> {
        let herm_defect = (rho - rho.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if herm_defect > 1e-10 {
            return Err(Error::InvalidConfig(format!(
                "density matrix is not Hermitian (defect {herm_defect:.3e})"
            )));
        }
        let trace = rho.trace();
        if (trace - C64::from(1.0)).norm() > 1e-10 {
            return Err(Error::InvalidConfig(format!(
                "density matrix trace {trace} is not 1"
            )));
        }
        let lowest = SymmetricEigen::new(rho).eigenvalues.min();
        if lowest < -1e-9 {
            return Err(Error::InvalidConfig(format!(
                "density matrix has negative eigenvalue {lowest:.3e}"
            )));
        }
        Ok(Self { rho })
    }

    pub fn density_matrix(&self) -> &M4 {
        &self.rho
    }

    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }

    /// Wootters concurrence.
    ///
    /// Uses the Hermitian form: the eigenvalues of
    /// `sqrt(rho) rho_tilde sqrt(rho)` are the squares of the usual
    /// `sqrt(sqrt(rho) rho_tilde sqrt(rho))` singular values, and the
    /// Hermitian eigenproblem is far better conditioned than the
    /// non-Hermitian `rho rho_tilde` route.
    pub fn concurrence(&self) -> f64 {
        let mut eig = SymmetricEigen::new(self.rho);
        for value in eig.eigenvalues.iter_mut() {
            *value = value.max(0.0).sqrt();
        }
        let sqrt_rho = eig.recompose();

        let zero = C64::ZERO;
        let neg = C64::new(-1.0, 0.0);
        let one = C64::from(1.0);
        // sigma_y kron sigma_y is real: antidiagonal (-1, 1, 1, -1).
        let flip = M4::new(
            zero, zero, zero, neg, //
            zero, zero, one, zero, //
            zero, one, zero, zero, //
            neg, zero, zero, zero,
        );
        let tilde = flip * self.rho.conjugate() * flip;
        let prod = sqrt_rho * tilde * sqrt_rho;
        let mut lambdas: Vec<f64> = SymmetricEigen::new(prod)
            .eigenvalues
            .iter()
            .map(|v| v.max(0.0).sqrt())
            .collect();
        lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
        (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
    }
}

/// Steady state of the generator: the null vector of its 16x16 matrix,
/// extracted by singular value decomposition, reshaped, Hermitized and
/// trace-normalized.
///
/// Errors with [`Error::DegenerateNullSpace`] when the second-smallest
/// singular value is also near zero, i.e. the steady state is not unique.
pub fn steady_state(gen: &Superoperator) -> Result<TwoQubitState> {
    let svd = (*gen).svd(true, true);
    let values = &svd.singular_values;
    let mut min_idx = 0;
    for idx in 1..16 {
        if values[idx] < values[min_idx] {
            min_idx = idx;
        }
    }
    let second = values
        .iter()
        .enumerate()
        .filter(|&(idx, _)| idx != min_idx)
        .map(|(_, &v)| v)
        .fold(f64::INFINITY, f64::min);
    if second < 1e-8 {
        return Err(Error::DegenerateNullSpace(second));
    }
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let null = v_t.row(min_idx).adjoint();
    let raw = M4::from_iterator(null.iter().copied());
    let herm = (raw + raw.adjoint()) * C64::new(0.5, 0.0);
    let trace = herm.trace();
    if trace.norm() < 1e-12 {
        return Err(Error::InvalidConfig(
            "steady-state candidate has zero trace".into(),
        ));
    }
    TwoQubitState::new(herm * trace.inv())
}
