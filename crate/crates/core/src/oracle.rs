//! Brute-force reference for the distributed model.
//!
//! The line is chopped into short segments; each segment applies an ideal
//! two-mode squeezer (strength `nu dx / v`, squeezing phase set by the local
//! pump phase `delta_k x`) and beamsplitter loss with the local decay rates.
//! Propagating the full 4x4 covariance matrix through the chain needs no
//! analytic input beyond the two primitive symplectic maps, which makes it a
//! genuinely independent check of the closed-form transfer-matrix results.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::distributed::DistributedConfig;
use crate::gaussian::{CovarianceMatrix, Moments};
use crate::{Error, Result};

/// How loss is interleaved with squeezing inside one segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stepping {
    /// Full-segment squeeze followed by full-segment loss: first-order
    /// accurate in the segment length.
    FirstOrder,
    /// Half loss, full squeeze, half loss: the symmetric split, second-order
    /// accurate.
    Strang,
}

/// A discretized line: configuration, segment count and splitting scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub config: DistributedConfig,
    pub segments: usize,
    pub stepping: Stepping,
}

impl ChainSpec {
    pub fn new(config: DistributedConfig, segments: usize, stepping: Stepping) -> Result<Self> {
        if segments == 0 {
            return Err(Error::InvalidConfig(
                "segment count must be at least 1".into(),
            ));
        }
        Ok(Self {
            config,
            segments,
            stepping,
        })
    }

    /// Pushes vacuum through the chain and reads the output moments.
    ///
    /// Profiles are sampled at segment midpoints, as is the pump phase. The
    /// result carries the same gauge as the analytic moments: the anomalous
    /// correlator is rotated back by the accumulated pump phase over the
    /// full length.
    pub fn propagate(&self) -> Moments {
        let cfg = &self.config;
        let n = self.segments;
        let dx = cfg.length / n as f64;
        let zeta = cfg.nu * dx / cfg.v;
        let mut sigma = Matrix4::identity();
        for seg in 0..n {
            let xm = (seg as f64 + 0.5) * dx;
            let phase = cfg.delta_k * xm;
            let eta_s = (-cfg.kappa_signal.rate_at(xm) * dx / cfg.v).exp();
            let eta_i = (-cfg.kappa_idler.rate_at(xm) * dx / cfg.v).exp();
            match self.stepping {
                Stepping::FirstOrder => {
                    apply_squeeze(&mut sigma, zeta, phase);
                    apply_loss(&mut sigma, eta_s.sqrt(), eta_i.sqrt());
                }
                Stepping::Strang => {
                    let (hs, hi) = (eta_s.sqrt().sqrt(), eta_i.sqrt().sqrt());
                    apply_loss(&mut sigma, hs, hi);
                    apply_squeeze(&mut sigma, zeta, phase);
                    apply_loss(&mut sigma, hs, hi);
                }
            }
        }
        let mut moments = CovarianceMatrix::from_matrix(sigma).to_moments();
        // Undo the pump-frame rotation accumulated over the line so the
        // gauge matches the analytic transfer matrix.
        moments.anomalous *= Complex64::new(0.0, -cfg.delta_k * cfg.length).exp();
        moments
    }
}

/// Doubles the segment count from 2^14 up to 2^20 until two successive
/// Strang propagations agree to 1e-8 in every moment, returning the finer.
pub fn converged_moments(config: &DistributedConfig) -> Moments {
    let mut segments = 1usize << 14;
    let mut prev = ChainSpec {
        config: config.clone(),
        segments,
        stepping: Stepping::Strang,
    }
    .propagate();
    while segments < (1 << 20) {
        segments *= 2;
        let next = ChainSpec {
            config: config.clone(),
            segments,
            stepping: Stepping::Strang,
        }
        .propagate();
        if moment_distance(&prev, &next) < 1e-8 {
            return next;
        }
        prev = next;
    }
    prev
}

/// Observed convergence order from propagations at `N`, `2N` and `4N`
/// segments: `log2(|f_N - f_2N| / |f_2N - f_4N|)`. `None` when the
/// differences are already at roundoff, where the ratio means nothing.
pub fn convergence_order(spec: &ChainSpec) -> Result<Option<f64>> {
    if spec.segments < 4 {
        return Err(Error::InvalidConfig(
            "convergence order needs at least 4 segments".into(),
        ));
    }
    let run = |segments: usize| {
        ChainSpec {
            config: spec.config.clone(),
            segments,
            stepping: spec.stepping,
        }
        .propagate()
    };
    let coarse = run(spec.segments);
    let mid = run(spec.segments * 2);
    let fine = run(spec.segments * 4);
    let e1 = moment_distance(&coarse, &mid);
    let e2 = moment_distance(&mid, &fine);
    if e1 < 1e-13 || e2 < 1e-13 {
        return Ok(None);
    }
    Ok(Some((e1 / e2).log2()))
}

/// Largest absolute difference over the four moment components.
pub fn moment_distance(a: &Moments, b: &Moments) -> f64 {
    (a.n_signal - b.n_signal)
        .abs()
        .max((a.n_idler - b.n_idler).abs())
        .max((a.anomalous.re - b.anomalous.re).abs())
        .max((a.anomalous.im - b.anomalous.im).abs())
}

/// Two-mode squeezer on the covariance, strength `zeta`, squeezing phase
/// `phase`: `sigma -> S sigma S^T` with the symplectic
///
/// ```text
/// S = [ c I    s R(phase) ]      R(p) = [ cos p   sin p ]
///     [ s R(phase)   c I  ],            [ sin p  -cos p ]
/// ```
///
/// (`c = cosh zeta`, `s = sinh zeta`).
fn apply_squeeze(sigma: &mut Matrix4<f64>, zeta: f64, phase: f64) {
    let c = zeta.cosh();
    let s = zeta.sinh();
    let (sp, cp) = phase.sin_cos();
    let sq = Matrix4::new(
        c,
        0.0,
        s * cp,
        s * sp, //
        0.0,
        c,
        s * sp,
        -s * cp, //
        s * cp,
        s * sp,
        c,
        0.0, //
        s * sp,
        -s * cp,
        0.0,
        c,
    );
    *sigma = sq * *sigma * sq.transpose();
}

/// Beamsplitter loss with amplitude transmissions `t_s`, `t_i`:
/// `sigma -> T sigma T + (I - T^2)` for diagonal `T`.
fn apply_loss(sigma: &mut Matrix4<f64>, t_s: f64, t_i: f64) {
    let t = [t_s, t_s, t_i, t_i];
    for row in 0..4 {
        for col in 0..4 {
            sigma[(row, col)] *= t[row] * t[col];
        }
    }
    for (idx, ti) in t.iter().enumerate() {
        sigma[(idx, idx)] += 1.0 - ti * ti;
    }
}
