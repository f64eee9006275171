//! Loss distributed along the amplifier line.
//!
//! The signal/idler envelope pair `(a_S, a_I†)` obeys a linear spatial
//! equation with parametric coupling `nu`, per-length decay rates
//! `kappa_S(x)`, `kappa_I(x)` (divided by the phase velocity `v` to convert
//! to spatial rates), and phase mismatch `delta_k`. For position-independent
//! rates the transfer matrix is closed-form and the loss-port noise enters
//! through one scalar integral per moment. On top of that sit the derived
//! quantities: gain, input-referred added noise, squeezing level, the
//! equivalent beamsplitter picture, the optimum amplifier length, and the
//! attenuation correction that rebalances the output.

use num_complex::Complex64;

use crate::gaussian::Moments;
use crate::lumped::Correction;
use crate::{quad, Error, Result};

/// Spatial decay-rate profile of one mode.
#[derive(Debug, Clone, PartialEq)]
pub enum DecayProfile {
    /// Uniform rate along the whole line.
    Constant(f64),
    /// Piecewise-constant cells `(end, rate)`: the first cell runs from 0 to
    /// its `end`, each later one from the previous `end`. Ends must increase
    /// strictly and the last must reach the length of the device.
    Steps(Vec<(f64, f64)>),
}

impl DecayProfile {
    fn validate(&self, length: f64) -> Result<()> {
        match self {
            Self::Constant(rate) => {
                if !(*rate >= 0.0) {
                    return Err(Error::InvalidConfig(format!("negative decay rate {rate}")));
                }
            }
            Self::Steps(cells) => {
                if cells.is_empty() {
                    return Err(Error::InvalidConfig("empty step profile".into()));
                }
                let mut prev = 0.0;
                for &(end, rate) in cells {
                    if !(end > prev) {
                        return Err(Error::InvalidConfig(format!(
                            "step ends must increase strictly: {end} after {prev}"
                        )));
                    }
                    if !(rate >= 0.0) {
                        return Err(Error::InvalidConfig(format!("negative decay rate {rate}")));
                    }
                    prev = end;
                }
                if prev < length {
                    return Err(Error::InvalidConfig(format!(
                        "profile ends at {prev}, short of the device length {length}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Rate at position `x`; past the final cell the last rate extends.
    pub fn rate_at(&self, x: f64) -> f64 {
        match self {
            Self::Constant(rate) => *rate,
            Self::Steps(cells) => {
                let idx = cells.partition_point(|&(end, _)| end <= x);
                cells[idx.min(cells.len() - 1)].1
            }
        }
    }

    /// Exact integral of the rate over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            Self::Constant(rate) => rate * (b - a),
            Self::Steps(cells) => {
                let mut acc = 0.0;
                let mut start = 0.0_f64;
                for &(end, rate) in cells {
                    acc += rate * (end.min(b) - start.max(a)).max(0.0);
                    start = end;
                }
                // Extend the last rate beyond the final cell.
                acc + cells[cells.len() - 1].1 * (b - start.max(a)).max(0.0)
            }
        }
    }

    /// The uniform rate, when the profile is the `Constant` variant.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Self::Constant(rate) => Some(*rate),
            Self::Steps(_) => None,
        }
    }
}

/// Amplifier line: coupling, phase velocity, length, decay profiles and
/// phase mismatch.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributedConfig {
    /// Pump-induced parametric coupling rate (same units as the decay rates).
    pub nu: f64,
    /// Phase velocity converting temporal rates to spatial ones.
    pub v: f64,
    /// Device length.
    pub length: f64,
    pub kappa_signal: DecayProfile,
    pub kappa_idler: DecayProfile,
    /// Phase mismatch per unit length.
    pub delta_k: f64,
}

/// 2x2 spatial transfer matrix acting on `(a_S, a_I†)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub ss: Complex64,
    pub si: Complex64,
    pub is: Complex64,
    pub ii: Complex64,
}

/// Beamsplitter picture equivalent to a symmetric distributed line: the
/// leaked fraction `1 - eta` arrives squeezed by `r_prime` rather than as
/// vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LumpedEquivalent {
    pub eta: f64,
    pub r_prime: f64,
}

impl LumpedEquivalent {
    /// Balanced-quadrature variance of the picture with ideal squeezing `r`:
    /// `[(1 - eta) e^{-2 r'} + eta e^{-2 r}] / 2`.
    pub fn squeezing(&self, r: f64) -> f64 {
        0.5 * ((1.0 - self.eta) * (-2.0 * self.r_prime).exp() + self.eta * (-2.0 * r).exp())
    }
}

impl DistributedConfig {
    pub fn new(
        nu: f64,
        v: f64,
        length: f64,
        kappa_signal: DecayProfile,
        kappa_idler: DecayProfile,
        delta_k: f64,
    ) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "coupling nu = {nu} must be > 0"
            )));
        }
        if !(v > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "phase velocity v = {v} must be > 0"
            )));
        }
        if !(length >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "length {length} must be >= 0"
            )));
        }
        if !delta_k.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "phase mismatch {delta_k} is not finite"
            )));
        }
        kappa_signal.validate(length)?;
        kappa_idler.validate(length)?;
        Ok(Self {
            nu,
            v,
            length,
            kappa_signal,
            kappa_idler,
            delta_k,
        })
    }

    /// Uniform-rate convenience constructor with matched decay and zero
    /// phase mismatch.
    pub fn symmetric(nu: f64, v: f64, length: f64, kappa: f64) -> Result<Self> {
        Self::new(
            nu,
            v,
            length,
            DecayProfile::Constant(kappa),
            DecayProfile::Constant(kappa),
            0.0,
        )
    }

    /// Uniform-rate convenience constructor with zero phase mismatch.
    pub fn uniform(nu: f64, v: f64, length: f64, ks: f64, ki: f64) -> Result<Self> {
        Self::new(
            nu,
            v,
            length,
            DecayProfile::Constant(ks),
            DecayProfile::Constant(ki),
            0.0,
        )
    }

    fn constant_rates(&self) -> Result<(f64, f64)> {
        match (
            self.kappa_signal.as_constant(),
            self.kappa_idler.as_constant(),
        ) {
            (Some(ks), Some(ki)) => Ok((ks, ki)),
            _ => Err(Error::NonConstantProfile),
        }
    }

    /// Transfer matrix entries at position `x`, for uniform rates.
    ///
    /// With spatial rates `k = kappa / v`, `n = nu / v` and
    /// `z = (k_S - k_I)/4 + i delta_k / 2`, the eigenfrequency is
    /// `nut = sqrt(n^2 + z^2)` and
    ///
    /// ```text
    /// ss/ii = e^{-(k_S + k_I) x / 4} [cosh(nut x) -/+ z sinh(nut x)/nut]
    /// si = is = e^{-(k_S + k_I) x / 4} n sinh(nut x)/nut
    /// ```
    pub fn transfer_matrix(&self, x: f64) -> Result<TransferMatrix> {
        let (ks, ki) = self.constant_rates()?;
        if !(0.0..=self.length).contains(&x) {
            return Err(Error::InvalidConfig(format!(
                "position {x} outside the device [0, {}]",
                self.length
            )));
        }
        Ok(self.entries_at(ks, ki, x))
    }

    fn entries_at(&self, ks: f64, ki: f64, x: f64) -> TransferMatrix {
        let n = self.nu / self.v;
        let z = Complex64::new((ks - ki) / (4.0 * self.v), 0.5 * self.delta_k);
        let nut = (Complex64::new(n * n, 0.0) + z * z).sqrt();
        let pre = (-(ks + ki) * x / (4.0 * self.v)).exp();
        let arg = nut * x;
        let cosh = arg.cosh();
        let shc = sinhc_over(nut, x);
        TransferMatrix {
            ss: pre * (cosh - z * shc),
            si: pre * n * shc,
            is: pre * n * shc,
            ii: pre * (cosh + z * shc),
        }
    }

    /// Output second moments for uniform rates: the coherent part from the
    /// transfer matrix at the full length, the incoherent part from the
    /// loss-port noise integrated along the line.
    pub fn output_moments(&self) -> Result<Moments> {
        let (ks, ki) = self.constant_rates()?;
        let end = self.entries_at(ks, ki, self.length);
        let si_norm = quad::integrate_real(
            |u| self.entries_at(ks, ki, u).si.norm_sqr(),
            0.0,
            self.length,
        )?;
        let cross = quad::integrate(
            |u| {
                let t = self.entries_at(ks, ki, u);
                t.ss * t.si.conj()
            },
            0.0,
            self.length,
        )?;
        Ok(Moments {
            n_signal: end.si.norm_sqr() + ki / self.v * si_norm,
            n_idler: end.si.norm_sqr() + ks / self.v * si_norm,
            anomalous: end.ss * end.si.conj() + ks / self.v * cross,
        })
    }

    /// Signal power gain `|ss(L)|^2`.
    pub fn gain(&self) -> Result<f64> {
        Ok(self.transfer_matrix(self.length)?.ss.norm_sqr())
    }

    /// Gain of the same line without loss or phase mismatch,
    /// `cosh^2(nu L / v)`.
    pub fn ideal_gain(&self) -> f64 {
        (self.nu * self.length / self.v).cosh().powi(2)
    }

    /// Input-referred added noise `(N_S + 1/2) / G - 1/2`, in units where an
    /// ideal phase-preserving amplifier approaches 1/2 at large gain.
    pub fn added_noise(&self) -> Result<f64> {
        let gain = self.gain()?;
        if gain < 1.0 {
            return Err(Error::SubunityGain(gain));
        }
        let m = self.output_moments()?;
        Ok((m.n_signal + 0.5) / gain - 0.5)
    }

    /// Balanced-quadrature variance `Var[(X_S - X_I)/sqrt(2)]` at the output.
    ///
    /// Phase-matched uniform lines use the closed form; with phase mismatch
    /// the moments are integrated instead.
    pub fn squeezing(&self) -> Result<f64> {
        let (ks, ki) = self.constant_rates()?;
        if self.delta_k == 0.0 {
            let n = self.nu / self.v;
            let kbar = (ks + ki) / (2.0 * self.v);
            // The balanced variance is label-symmetric, so only |eps| matters.
            let eps = ((ks - ki) / (2.0 * self.v)).abs();
            Ok(squeezed_variance_uniform(n, kbar, eps, self.length, 1.0))
        } else {
            Ok(self.output_moments()?.x_minus_variance())
        }
    }

    /// Balanced-quadrature variance for a position-dependent decay profile,
    /// which must be the same for both modes (and phase-matched).
    ///
    /// Cell-by-cell the noise integral is elementary, so the result is exact
    /// up to roundoff:
    ///
    /// ```text
    /// 2 S = e^{-K(L) - 2 n L}
    ///     + sum_cells k e^{-(K(L) - K(x0)) - 2 n (L - x0)} (e^{(k + 2n) dx} - 1) / (k + 2n)
    /// ```
    ///
    /// with `K` the running integral of the spatial rate `k(x)`.
    pub fn spatial_profile_squeezing(&self) -> Result<f64> {
        if self.kappa_signal != self.kappa_idler {
            return Err(Error::AsymmetricInput);
        }
        if self.delta_k != 0.0 {
            return Err(Error::InvalidConfig(
                "spatial-profile squeezing requires zero phase mismatch".into(),
            ));
        }
        let n = self.nu / self.v;
        let l = self.length;
        let cells: Vec<(f64, f64, f64)> = match &self.kappa_signal {
            DecayProfile::Constant(rate) => vec![(0.0, l, rate / self.v)],
            DecayProfile::Steps(steps) => {
                let mut out = Vec::with_capacity(steps.len());
                let mut start = 0.0;
                for &(end, rate) in steps {
                    if start >= l {
                        break;
                    }
                    out.push((start, end.min(l), rate / self.v));
                    start = end;
                }
                out
            }
        };
        let k_total: f64 = cells.iter().map(|&(x0, x1, k)| k * (x1 - x0)).sum();
        let mut doubled = (-k_total - 2.0 * n * l).exp();
        let mut k_before = 0.0;
        for &(x0, x1, k) in &cells {
            if k > 0.0 {
                let tail = (-(k_total - k_before) - 2.0 * n * (l - x0)).exp();
                let rate = k + 2.0 * n;
                doubled += k * tail * (rate * (x1 - x0)).exp_m1() / rate;
            }
            k_before += k * (x1 - x0);
        }
        Ok(0.5 * doubled)
    }

    /// Maps a symmetric uniform line onto the beamsplitter picture:
    /// transmission `eta = 2 n e^{-kbar L} / (kbar + 2 n)` and residual
    /// squeezing `e^{-2 r'} = kbar / (kbar + 2 n (1 - e^{-kbar L}))` of the
    /// leaked field (spatial rates `n`, `kbar`).
    pub fn lumped_equivalent(&self) -> Result<LumpedEquivalent> {
        let (ks, ki) = self.constant_rates()?;
        if ks != ki {
            return Err(Error::AsymmetricInput);
        }
        if self.delta_k != 0.0 {
            return Err(Error::InvalidConfig(
                "the beamsplitter picture requires zero phase mismatch".into(),
            ));
        }
        let n = self.nu / self.v;
        let kbar = ks / self.v;
        let eta = 2.0 * n * (-kbar * self.length).exp() / (kbar + 2.0 * n);
        let e2rp = if kbar == 0.0 {
            // Lossless limit: the branch transmitting everything; the leaked
            // fraction vanishes but its squeezing stays finite.
            1.0 / (1.0 + 2.0 * n * self.length)
        } else {
            kbar / (kbar - 2.0 * n * (-kbar * self.length).exp_m1())
        };
        Ok(LumpedEquivalent {
            eta,
            r_prime: -0.5 * e2rp.ln(),
        })
    }

    /// Length at which the balanced-quadrature variance of a phase-matched
    /// uniform line is smallest.
    ///
    /// Any decay asymmetry feeds amplified noise into the balanced
    /// quadrature, so past some length the variance turns around and grows;
    /// the turning point is found by a scan plus golden-section refinement
    /// of the closed form. Symmetric lines squeeze monotonically toward
    /// saturation and have no optimum.
    pub fn optimal_length(&self) -> Result<f64> {
        let (n, kbar, eps_signed) = self.uniform_matched_rates()?;
        let eps = eps_signed.abs();
        if eps == 0.0 {
            return Err(Error::NoMinimum);
        }
        let nut = (n * n + 0.25 * eps * eps).sqrt();
        let growth = 2.0 * nut - kbar;
        // Length scales of the estimate, of the bare squeezer and of the
        // slowest transient; generous because the scan widens as needed.
        let mut upper = 5.0
            * (((4.0 * n / eps).ln() / (2.0 * n)).max(0.0)
                + 0.5 / n
                + if growth == 0.0 {
                    0.0
                } else {
                    growth.abs().recip()
                });
        let f = |l: f64| squeezed_variance_uniform(n, kbar, eps, l, 1.0);
        for _ in 0..12 {
            if let Some((a, b)) = bracket_minimum(&f, upper) {
                return Ok(golden_min(&f, a, b));
            }
            upper *= 4.0;
        }
        // Unreachable for eps > 0: the asymmetry term grows (or decays
        // slowest) like e^{(2 nut - kbar) L}, so the variance always turns.
        Err(Error::NoMinimum)
    }

    /// Leading-order estimate of the optimum length,
    /// `(v / 2 nu) ln(nu / |kappa_S - kappa_I|)`.
    pub fn optimal_length_estimate(&self) -> Result<f64> {
        let (n, _, eps) = self.uniform_matched_rates()?;
        if eps == 0.0 {
            return Err(Error::NoMinimum);
        }
        Ok((n / (2.0 * eps.abs())).ln() / (2.0 * n))
    }

    /// Attenuation of the less lossy mode that restores the balanced
    /// squeezing angle of a phase-matched uniform line, with the resulting
    /// variance. The amplitude transmission is `n / (nut + eps/2)` in
    /// spatial rates; `roles_swapped` records that the idler was the lossier
    /// mode, so the attenuation acts on the signal.
    pub fn corrected(&self) -> Result<Correction> {
        let (n, kbar, eps_signed) = self.uniform_matched_rates()?;
        let roles_swapped = eps_signed < 0.0;
        let eps = eps_signed.abs();
        let nut = (n * n + 0.25 * eps * eps).sqrt();
        let t = n / (nut + 0.5 * eps);
        Ok(Correction {
            attenuation: t * t,
            squeezing: squeezed_variance_uniform(n, kbar, eps, self.length, t),
            roles_swapped,
        })
    }

    /// Spatial `(n, kbar, eps)` with `eps` signed (negative when the idler
    /// is lossier); requires uniform rates and zero phase mismatch.
    fn uniform_matched_rates(&self) -> Result<(f64, f64, f64)> {
        let (ks, ki) = self.constant_rates()?;
        if self.delta_k != 0.0 {
            return Err(Error::InvalidConfig(
                "operation requires zero phase mismatch".into(),
            ));
        }
        Ok((
            self.nu / self.v,
            (ks + ki) / (2.0 * self.v),
            (ks - ki) / (2.0 * self.v),
        ))
    }
}

/// Gain of the cavity-based amplifier with the same rates, for comparison:
/// `sqrt(G) = (Q^2 + 1) / (Q^2 - 1)` with `Q = 2 nu / sqrt(kappa_S kappa_I)`.
pub fn cavity_gain_reference(nu: f64, kappa_signal: f64, kappa_idler: f64) -> Result<f64> {
    if !(kappa_signal > 0.0) || !(kappa_idler > 0.0) {
        return Err(Error::InvalidConfig(
            "cavity comparison needs strictly positive decay rates".into(),
        ));
    }
    let q_sq = 4.0 * nu * nu / (kappa_signal * kappa_idler);
    if (q_sq - 1.0).abs() < 1e-12 {
        return Err(Error::DivergentGain);
    }
    let root = (q_sq + 1.0) / (q_sq - 1.0);
    Ok(root * root)
}

/// `sinh(nut x) / nut`, stable as `nut -> 0`.
fn sinhc_over(nut: Complex64, x: f64) -> Complex64 {
    if nut.norm() < 1e-6 {
        let w = (nut * x) * (nut * x);
        x * (1.0 + w / 6.0 + w * w / 120.0 + w * w * w / 5040.0)
    } else {
        (nut * x).sinh() / nut
    }
}

/// Balanced-quadrature variance of a phase-matched uniform line, with an
/// extra amplitude transmission `t` applied to the less lossy mode at the
/// output (`t = 1` means no correction). All rates spatial.
///
/// The variance is a sum of four exponentials in the length; the coefficient
/// of `e^{(2 nut - kbar) L}` is algebraically `(2 n m / a)(t - n/m)^2` with
/// `m = nut + eps/2`, which this routine uses verbatim so that the corrected
/// transmission `t = n/m` kills the growing term *exactly* instead of
/// leaving a cancellation residue that explodes with length.
pub(crate) fn squeezed_variance_uniform(n: f64, kbar: f64, eps: f64, length: f64, t: f64) -> f64 {
    let nut = (n * n + 0.25 * eps * eps).sqrt();
    let m = nut + 0.5 * eps;
    let w = nut - 0.5 * eps;
    let ks = kbar + eps;
    let ki = kbar - eps;
    let t2 = t * t;
    let alpha_b = (1.0 + t2) * n - 2.0 * t * w;
    let beta_b = (1.0 + t2) * n + 2.0 * t * m;
    let alpha_n = (ki + t2 * ks) * n - 2.0 * t * ks * w;
    let beta_n = (ki + t2 * ks) * n + 2.0 * t * ks * m;
    let growth = 2.0 * nut - kbar;
    let decay = |x: f64| -> f64 {
        // expm1(x L)/x: the length-integrated weight of a rate-x exponential.
        if x == 0.0 {
            length
        } else {
            (x * length).exp_m1() / x
        }
    };
    let amplified = if growth.abs() > 1e-9 {
        let lead = (2.0 * n * m / growth) * (t - n / m).powi(2);
        lead * (growth * length).exp() - alpha_n / growth
    } else {
        alpha_b * (growth * length).exp() + alpha_n * decay(growth)
    };
    let transients = beta_b * (-(2.0 * nut + kbar) * length).exp()
        + beta_n * decay(-(2.0 * nut + kbar))
        - (alpha_b + beta_b) * (-kbar * length).exp()
        - (alpha_n + beta_n) * decay(-kbar);
    0.5 * (1.0 + n / (4.0 * nut * nut) * (amplified + transients))
}

/// Coarse scan for a bracket around the interior minimum of `f` on
/// `[0, upper]`; `None` when the minimum sits on the right edge.
fn bracket_minimum<F: Fn(f64) -> f64>(f: &F, upper: f64) -> Option<(f64, f64)> {
    const N: usize = 256;
    let h = upper / N as f64;
    let mut best = (0, f(0.0));
    for i in 1..=N {
        let v = f(i as f64 * h);
        if v < best.1 {
            best = (i, v);
        }
    }
    if best.0 == N {
        return None;
    }
    Some((h * best.0.saturating_sub(1) as f64, h * (best.0 + 1) as f64))
}

/// Golden-section minimization on `[a, b]` down to absolute width 1e-10.
fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
