#![allow(dead_code)]

/// Absolute-tolerance comparison with a readable failure message.
pub fn assert_close(actual: f64, expected: f64, tol: f64, label: &str) {
    let diff = (actual - expected).abs();
    assert!(
        diff <= tol,
        "{label}: got {actual:.17e}, want {expected:.17e} (|diff| = {diff:.3e} > {tol:.1e})"
    );
}

/// Relative-tolerance comparison (scaled by the expected magnitude).
pub fn assert_rel(actual: f64, expected: f64, rel: f64, label: &str) {
    let diff = (actual - expected).abs();
    let scale = expected.abs().max(f64::MIN_POSITIVE);
    assert!(
        diff <= rel * scale,
        "{label}: got {actual:.17e}, want {expected:.17e} (rel diff = {:.3e} > {rel:.1e})",
        diff / scale
    );
}
