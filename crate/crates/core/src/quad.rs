//! Adaptive Simpson quadrature over complex-valued integrands.
//!
//! The distributed-loss noise integrals are smooth products of exponentials,
//! so plain Simpson with the classic `/15` Richardson acceptance test
//! converges fast; the global subdivision budget turns pathological inputs
//! into an error instead of a hang.

use num_complex::Complex64;

use crate::{Error, Result};

/// Relative tolerance requested from the subdivision loop. Tighter than the
/// guaranteed contract so downstream moment arithmetic keeps headroom.
pub const REL_TOL: f64 = 1e-12;

/// Absolute floor below which refinement stops chasing roundoff.
pub const ABS_FLOOR: f64 = 1e-14;

/// Total number of interval splits allowed before giving up.
pub const MAX_SPLITS: u32 = 1 << 20;

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::ZERO);
    }
    // Coarse composite estimate to set the error scale; a single panel can
    // miss structure and pick a tolerance that is too loose.
    let n0 = 16;
    let h = (b - a) / n0 as f64;
    let mut coarse = Complex64::ZERO;
    for i in 0..n0 {
        let (x0, x2) = (a + i as f64 * h, a + (i + 1) as f64 * h);
        coarse += simpson(&f, x0, f(x0), x2, f(x2)).1;
    }
    let tol = (REL_TOL * coarse.norm()).max(ABS_FLOOR);

    let fa = f(a);
    let fb = f(b);
    let (fm, whole) = simpson(&f, a, fa, b, fb);
    let mut splits = 0u32;
    refine(&f, (a, fa), (b, fb), fm, whole, tol, 0, &mut splits)
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate(|x| Complex64::new(f(x), 0.0), a, b).map(|v| v.re)
}

/// Simpson rule on `[a, b]`; returns the midpoint sample along with the
/// estimate so callers can reuse it.
fn simpson<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    fa: Complex64,
    b: f64,
    fb: Complex64,
) -> (Complex64, Complex64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> Complex64>(
    f: &F,
    left_end: (f64, Complex64),
    right_end: (f64, Complex64),
    fm: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
    splits: &mut u32,
) -> Result<Complex64> {
    let (a, fa) = left_end;
    let (b, fb) = right_end;
    let m = 0.5 * (a + b);
    let (flm, left) = simpson(f, a, fa, m, fm);
    let (frm, right) = simpson(f, m, fm, b, fb);
    let correction = (left + right - whole) / 15.0;
    // Depth cap: 48 halvings reach interval widths below f64 resolution for
    // any sane domain, so further subdivision cannot improve anything.
    if correction.norm() * 15.0 <= tol || depth >= 48 {
        return Ok(left + right + correction);
    }
    *splits += 1;
    if *splits > MAX_SPLITS {
        return Err(Error::QuadratureFailure(format!(
            "interval budget {MAX_SPLITS} exhausted on [{a}, {b}]"
        )));
    }
    let half_tol = 0.5 * tol;
    Ok(
        refine(f, (a, fa), (m, fm), flm, left, half_tol, depth + 1, splits)?
            + refine(f, (m, fm), (b, fb), frm, right, half_tol, depth + 1, splits)?,
    )
}
