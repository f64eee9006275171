//! Gaussian-state model of a travelling-wave parametric amplifier (TWPA)
//! whose signal and idler modes see different loss rates.
//!
//! A single signal/idler frequency pair of a phase-preserving amplifier is a
//! two-mode Gaussian channel, so everything observable about the output field
//! is contained in three second moments: the signal and idler photon numbers
//! and the anomalous correlator `<a_S a_I>`. The crate provides
//!
//! * [`gaussian`] — the moment algebra: conversion to and from the
//!   thermal two-mode-squeezed-state normal form, covariance matrices,
//!   purity, logarithmic negativity and collective quadrature variances;
//! * [`lumped`] — loss modelled as a pair of beamsplitters after an ideal
//!   squeezer, with closed-form squeezing levels and the single-mode
//!   attenuation that restores the balanced squeezing angle;
//! * [`distributed`] — loss distributed along the amplifier, via the exact
//!   spatial transfer matrix and noise integrals, plus gain, added noise,
//!   optimal amplifier length and the distributed analogue of the
//!   attenuation correction;
//! * [`oracle`] — a brute-force check of [`distributed`]: the covariance
//!   matrix is pushed through a chain of short ideal squeezers interleaved
//!   with discrete loss elements;
//! * [`qubit`] — a pair of qubits driven by the amplifier output, with the
//!   Lindblad steady state and its concurrence.

// Validation guards are written `!(x > 0.0)` rather than `x <= 0.0` so that
// NaN inputs fail them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributed;
pub mod gaussian;
pub mod lumped;
pub mod oracle;
pub mod quad;
pub mod qubit;

/// Errors shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Second moments violate the two-mode uncertainty relation.
    #[error("moments are not physical: {0}")]
    NonPhysicalMoments(String),

    /// A covariance matrix has a symplectic eigenvalue below vacuum.
    #[error("covariance is not physical: smallest symplectic eigenvalue {0} < 1")]
    NonPhysicalCovariance(f64),

    /// Loss asymmetry parameters that would push a transmission outside [0, 1].
    #[error("mean loss {eps_bar} with asymmetry {delta} puts a transmission outside [0, 1]")]
    InvalidAsymmetry { eps_bar: f64, delta: f64 },

    /// The idler path transmits nothing, so no signal attenuation can match it.
    #[error("idler transmission is zero; no attenuation can rebalance the pair")]
    DegenerateChannel,

    /// An operation that needs uniform decay rates got a spatial profile.
    #[error(
        "decay profile varies with position; use the segment chain or the spatial-profile routine"
    )]
    NonConstantProfile,

    /// An operation that needs equal signal/idler decay (and zero phase
    /// mismatch) got an asymmetric configuration.
    #[error("operation requires equal signal and idler decay rates")]
    AsymmetricInput,

    /// Adaptive quadrature ran out of subdivisions.
    #[error("adaptive quadrature failed: {0}")]
    QuadratureFailure(String),

    /// Added noise referred to the input is undefined below unit gain.
    #[error("gain {0} is below one; input-referred added noise is undefined")]
    SubunityGain(f64),

    /// Squeezing decreases monotonically with length, so there is no optimum.
    #[error("squeezed variance is monotone in length; no interior optimum exists")]
    NoMinimum,

    /// The cavity-amplifier comparison point diverges at unit quality factor.
    #[error("cavity gain diverges at quality factor 1")]
    DivergentGain,

    /// The Lindblad generator has more than one steady state.
    #[error("steady state is not unique: second singular value {0} is also near zero")]
    DegenerateNullSpace(f64),

    /// A parameter is outside the domain of the requested operation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
