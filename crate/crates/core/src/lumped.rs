//! Loss as a pair of beamsplitters after an ideal two-mode squeezer.
//!
//! The simplest model of an amplifier with unequal signal/idler loss: squeeze
//! vacuum by `r`, then transmit the signal with `eta_S` and the idler with
//! `eta_I`. Everything stays closed-form, which makes this the reference
//! point for the distributed model and the driving field for the qubit pair.

use num_complex::Complex64;

use crate::gaussian::Moments;
use crate::{Error, Result};

/// Mean loss `eps_bar` split unevenly over the pair: the signal sees
/// `eps_bar (1 + delta)`, the idler `eps_bar (1 - delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossAsymmetry {
    pub eps_bar: f64,
    pub delta: f64,
}

impl LossAsymmetry {
    pub fn new(eps_bar: f64, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) || !(eps_bar >= 0.0) || eps_bar * (1.0 + delta) > 1.0 {
            return Err(Error::InvalidAsymmetry { eps_bar, delta });
        }
        Ok(Self { eps_bar, delta })
    }

    /// `(eta_S, eta_I)` power transmissions of the two beamsplitters.
    pub fn transmissions(&self) -> (f64, f64) {
        (
            1.0 - self.eps_bar * (1.0 + self.delta),
            1.0 - self.eps_bar * (1.0 - self.delta),
        )
    }
}

/// Squeezer strength plus the two beamsplitter transmissions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LumpedConfig {
    pub r: f64,
    pub eta_signal: f64,
    pub eta_idler: f64,
}

/// Result of rebalancing an asymmetric pair by attenuating the cleaner mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correction {
    /// Extra power transmission applied to the less lossy mode.
    pub attenuation: f64,
    /// Balanced-quadrature variance after the attenuation.
    pub squeezing: f64,
    /// True when the idler was the lossier mode, so the attenuation acts on
    /// the signal instead.
    pub roles_swapped: bool,
}

impl LumpedConfig {
    pub fn new(r: f64, eta_signal: f64, eta_idler: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "squeeze strength r = {r} must be >= 0"
            )));
        }
        for (name, eta) in [("eta_signal", eta_signal), ("eta_idler", eta_idler)] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::InvalidConfig(format!(
                    "{name} = {eta} outside [0, 1]"
                )));
            }
        }
        Ok(Self {
            r,
            eta_signal,
            eta_idler,
        })
    }

    pub fn from_asymmetry(r: f64, asym: LossAsymmetry) -> Result<Self> {
        let (eta_signal, eta_idler) = asym.transmissions();
        Self::new(r, eta_signal, eta_idler)
    }

    /// Output second moments: each beamsplitter scales its mode amplitude by
    /// `sqrt(eta)` and injects vacuum through the dark port.
    pub fn output_moments(&self) -> Moments {
        let sh = self.r.sinh();
        Moments {
            n_signal: self.eta_signal * sh * sh,
            n_idler: self.eta_idler * sh * sh,
            anomalous: Complex64::new(
                (self.eta_signal * self.eta_idler).sqrt() * (2.0 * self.r).sinh() / 2.0,
                0.0,
            ),
        }
    }

    /// Variance of `(X_S - X_I) / sqrt(2)` at the output.
    ///
    /// Expanded in exponentials, twice the variance is the loss floor
    /// `1 - (eta_S + eta_I)/2` plus `e^{-2r} (sqrt(eta_S) + sqrt(eta_I))^2 / 4`
    /// plus `e^{2r} (sqrt(eta_S) - sqrt(eta_I))^2 / 4`: any transmission
    /// mismatch feeds the *anti*-squeezed quadrature into the difference
    /// mode, so the last term grows with gain.
    pub fn squeezing(&self) -> f64 {
        self.output_moments().x_minus_variance()
    }

    /// Variance at the rebalanced angle `tan(theta) = sqrt(eta_S / eta_I)`,
    /// the best collective quadrature of the asymmetric pair:
    /// `[1 - (2 eta_S eta_I / (eta_S + eta_I)) (1 - e^{-2r})] / 2`.
    pub fn matched_quadrature_variance(&self) -> f64 {
        let (es, ei) = (self.eta_signal, self.eta_idler);
        if es + ei == 0.0 {
            return 0.5;
        }
        0.5 * (1.0 - (2.0 * es * ei / (es + ei)) * (1.0 - (-2.0 * self.r).exp()))
    }

    /// Attenuates the less lossy mode down to the transmission of the other,
    /// restoring the balanced squeezing angle. The attenuated pair is
    /// symmetric with the *worse* transmission, so this trades squeezing
    /// level for angle stability.
    pub fn corrected(&self) -> Result<Correction> {
        let roles_swapped = self.eta_signal > self.eta_idler;
        let (lossy, clean) = if roles_swapped {
            (self.eta_idler, self.eta_signal)
        } else {
            (self.eta_signal, self.eta_idler)
        };
        if clean == 0.0 {
            return Err(Error::DegenerateChannel);
        }
        Ok(Correction {
            attenuation: lossy / clean,
            squeezing: symmetric_squeezing(self.r, lossy),
            roles_swapped,
        })
    }
}

/// Balanced-quadrature variance when both modes share transmission `eta`:
/// `[(1 - eta) + eta e^{-2r}] / 2`, a convex mix of vacuum and the ideal
/// squeezed variance.
pub fn symmetric_squeezing(r: f64, eta: f64) -> f64 {
    0.5 * ((1.0 - eta) + eta * (-2.0 * r).exp())
}
