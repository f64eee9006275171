//! Distributed-loss line: transfer matrix, moments, gain, added noise,
//! squeezing, the beamsplitter picture, optimum length and the attenuation
//! correction. Reference values are high-precision evaluations of the same
//! closed forms, frozen to 17 digits.

// Reference constants keep their full frozen precision.
#![allow(clippy::excessive_precision)]

mod common;

use common::{assert_close, assert_rel};
use twpa_lab::distributed::{cavity_gain_reference, DecayProfile, DistributedConfig};
use twpa_lab::gaussian::Moments;
use twpa_lab::Error;

fn asym_line(length: f64) -> DistributedConfig {
    DistributedConfig::uniform(1.0, 1.0, length, 0.3, 0.1).unwrap()
}

fn sym_line(length: f64) -> DistributedConfig {
    DistributedConfig::symmetric(1.0, 1.0, length, 0.2).unwrap()
}

#[test]
fn transfer_matrix_starts_at_identity() {
    let t = asym_line(2.0).transfer_matrix(0.0).unwrap();
    assert_close(t.ss.re, 1.0, 1e-15, "ss at x=0");
    assert_close(t.ii.re, 1.0, 1e-15, "ii at x=0");
    assert_close(t.si.norm(), 0.0, 1e-15, "si at x=0");
    assert_close(t.is.norm(), 0.0, 1e-15, "is at x=0");
}

#[test]
fn lossless_transfer_matrix_is_the_ideal_squeezer() {
    let cfg = DistributedConfig::uniform(1.0, 1.0, 2.0, 0.0, 0.0).unwrap();
    let t = cfg.transfer_matrix(2.0).unwrap();
    assert_close(t.ss.re, 2.0_f64.cosh(), 1e-12, "ss lossless");
    assert_close(t.si.re, 2.0_f64.sinh(), 1e-12, "si lossless");
    assert_close(t.ss.im, 0.0, 1e-15, "ss lossless imag");
    // Bogoliubov relation, with and without phase mismatch.
    assert_close(
        t.ss.norm_sqr() - t.si.norm_sqr(),
        1.0,
        1e-10,
        "bogoliubov dk=0",
    );
    let mm = DistributedConfig::new(
        1.0,
        1.0,
        1.0,
        DecayProfile::Constant(0.0),
        DecayProfile::Constant(0.0),
        2.5,
    )
    .unwrap()
    .transfer_matrix(1.0)
    .unwrap();
    assert_close(
        mm.ss.norm_sqr() - mm.si.norm_sqr(),
        1.0,
        1e-10,
        "bogoliubov dk=2.5",
    );
}

#[test]
fn transfer_matrix_reference_entries() {
    // nu=1, kappa_S=0.3, kappa_I=0.1: renormalized rate sqrt(1 + 0.05^2/4)...
    let t = asym_line(2.0).transfer_matrix(1.0).unwrap();
    assert_close(t.ss.re, 1.3443774573625339, 1e-13, "ss(x=1)");
    assert_close(t.si.re, 1.0637821531751182, 1e-13, "si(x=1)");
    assert_close(t.si.im, 0.0, 1e-15, "si(x=1) imag");
    assert_close(t.si.re, t.is.re, 1e-15, "si = is");
}

#[test]
fn transfer_matrix_rejects_bad_positions_and_profiles() {
    assert!(matches!(
        asym_line(2.0).transfer_matrix(2.5),
        Err(Error::InvalidConfig(_))
    ));
    assert!(matches!(
        asym_line(2.0).transfer_matrix(-0.1),
        Err(Error::InvalidConfig(_))
    ));
    let stepped = DistributedConfig::new(
        1.0,
        1.0,
        2.0,
        DecayProfile::Steps(vec![(2.0, 0.2)]),
        DecayProfile::Steps(vec![(2.0, 0.2)]),
        0.0,
    )
    .unwrap();
    assert!(matches!(
        stepped.transfer_matrix(1.0),
        Err(Error::NonConstantProfile)
    ));
    assert!(matches!(
        stepped.output_moments(),
        Err(Error::NonConstantProfile)
    ));
}

#[test]
fn lossless_moments_are_a_pure_two_mode_squeezed_state() {
    let cfg = DistributedConfig::uniform(1.0, 1.0, 2.0, 0.0, 0.0).unwrap();
    let got = cfg.output_moments().unwrap();
    let want = Moments::pure_tmss(2.0);
    assert_close(got.n_signal, want.n_signal, 1e-12, "lossless n_signal");
    assert_close(got.n_idler, want.n_idler, 1e-12, "lossless n_idler");
    assert_close(
        got.anomalous.re,
        want.anomalous.re,
        1e-12,
        "lossless anomalous",
    );
    assert_close(got.anomalous.im, 0.0, 1e-15, "lossless anomalous imag");
}

#[test]
fn zero_length_line_outputs_vacuum() {
    let cfg = asym_line(0.0);
    let m = cfg.output_moments().unwrap();
    assert_close(m.n_signal, 0.0, 1e-15, "vacuum n_signal");
    assert_close(m.n_idler, 0.0, 1e-15, "vacuum n_idler");
    assert_close(m.anomalous.norm(), 0.0, 1e-15, "vacuum anomalous");
    assert_close(
        cfg.added_noise().unwrap(),
        0.0,
        1e-15,
        "zero-length added noise",
    );
}

#[test]
fn output_moments_reference_point() {
    let m = asym_line(2.0).output_moments().unwrap();
    assert_close(m.n_signal, 9.2651927837048864, 1e-9, "n_signal");
    assert_close(m.n_idler, 10.113211712417936, 1e-9, "n_idler");
    assert_close(m.anomalous.re, 10.128589056952303, 1e-9, "anomalous");
    assert_close(m.anomalous.im, 0.0, 1e-12, "anomalous imag");
    assert!(m.is_physical(), "reference moments must be physical");
}

#[test]
fn moments_route_matches_closed_form_squeezing() {
    // The integral route and the coefficient algebra must agree, including
    // when the idler is the lossier mode.
    for &(ks, ki) in &[(0.2, 0.2), (0.3, 0.1), (0.5, 0.0), (0.05, 0.35)] {
        for &l in &[0.7, 2.0] {
            let cfg = DistributedConfig::uniform(1.0, 1.0, l, ks, ki).unwrap();
            let via_moments = cfg.output_moments().unwrap().x_minus_variance();
            let closed = cfg.squeezing().unwrap();
            assert_close(
                via_moments,
                closed,
                1e-9,
                &format!("squeezing routes at ks={ks}, ki={ki}, L={l}"),
            );
        }
    }
}

#[test]
fn symmetric_squeezing_reference_curve() {
    assert_close(
        sym_line(1.0).squeezing().unwrap(),
        0.095819617437424492,
        1e-12,
        "S_sym(L=1)",
    );
    assert_close(
        sym_line(2.0).squeezing().unwrap(),
        0.051035154501394746,
        1e-12,
        "S_sym(L=2)",
    );
    // Long lines saturate at kbar / (2 (kbar + 2 nu)) = 1/22.
    assert_close(
        sym_line(20.0).squeezing().unwrap(),
        0.045454545454545455,
        1e-10,
        "saturation",
    );
    // Lossless limit: e^{-2 L nu / v} / 2.
    let lossless = DistributedConfig::uniform(1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
    assert_close(
        lossless.squeezing().unwrap(),
        0.067667641618306346,
        1e-15,
        "ideal r=1",
    );
}

#[test]
fn symmetric_squeezing_decreases_monotonically() {
    let mut prev = f64::INFINITY;
    for i in 1..=40 {
        let s = sym_line(0.25 * i as f64).squeezing().unwrap();
        assert!(
            s < prev,
            "symmetric squeezing rose from {prev} to {s} at L={}",
            0.25 * i as f64
        );
        prev = s;
    }
    assert!(
        prev > 1.0 / 22.0,
        "symmetric squeezing must stay above saturation"
    );
}

#[test]
fn asymmetric_squeezing_reference_curve() {
    assert_close(
        asym_line(1.0).squeezing().unwrap(),
        0.096398533173895727,
        1e-12,
        "S_asym(L=1)",
    );
    assert_close(
        asym_line(2.0).squeezing().unwrap(),
        0.060613191109108286,
        1e-12,
        "S_asym(L=2)",
    );
    assert_close(
        asym_line(3.0).squeezing().unwrap(),
        0.11856716497272952,
        1e-12,
        "S_asym(L=3)",
    );
    // Same average loss, swapped roles: the balanced variance cannot tell
    // the modes apart.
    let swapped = DistributedConfig::uniform(1.0, 1.0, 2.0, 0.1, 0.3).unwrap();
    assert_close(
        swapped.squeezing().unwrap(),
        0.060613191109108286,
        1e-12,
        "S_asym swapped labels",
    );
}

#[test]
fn asymmetric_squeezing_dips_then_grows_past_vacuum() {
    // The variance crosses 1/2 upward near L = 3.9912.
    assert!(asym_line(1.8674087257142544).squeezing().unwrap() < 0.5);
    assert!(asym_line(3.9).squeezing().unwrap() < 0.5);
    assert!(asym_line(4.1).squeezing().unwrap() > 0.5);
    assert!(asym_line(5.0).squeezing().unwrap() > 2.0);
}

#[test]
fn asymptotic_balanced_variance_is_cubically_accurate() {
    // Large-length form: the symmetric curve with the renormalized rate in
    // the squeezed exponential, plus an amplified term e^{2 nut L} eps^2
    // e^{-kbar L} / (16 nu (2 nu - kbar)). Residual bounded by 60 (eps/nu)^3.
    let (nu, kbar, l) = (1.0_f64, 0.2_f64, 5.0_f64);
    for &eps in &[0.025_f64, 0.05, 0.1, 0.2] {
        let cfg = DistributedConfig::uniform(nu, 1.0, l, kbar + eps, kbar - eps).unwrap();
        let exact = cfg.squeezing().unwrap();
        let nut = (nu * nu + 0.25 * eps * eps).sqrt();
        let approx = (kbar + 2.0 * nu * (-2.0 * l * nut - kbar * l).exp())
            / (2.0 * (kbar + 2.0 * nu))
            + (2.0 * l * nut - kbar * l).exp() * eps * eps / (16.0 * nu * (2.0 * nu - kbar));
        assert!(
            (exact - approx).abs() <= 60.0 * (eps / nu).powi(3),
            "asymptotic variance residual {} exceeds 60 eps^3 at eps={eps}",
            (exact - approx).abs(),
        );
    }
}

#[test]
fn gain_reference_points() {
    let ideal = DistributedConfig::uniform(1.0, 1.0, 3.0, 0.0, 0.0).unwrap();
    assert_close(
        ideal.gain().unwrap(),
        101.35781806122795,
        1e-10,
        "lossless gain",
    );
    assert_close(
        ideal.ideal_gain(),
        101.35781806122795,
        1e-10,
        "ideal gain helper",
    );
    let sym = sym_line(3.0);
    assert_close(
        sym.gain().unwrap(),
        55.626349961103172,
        1e-10,
        "symmetric gain",
    );
    // Symmetric loss only rescales the lossless gain: e^{-kbar L} cosh^2.
    assert_rel(
        sym.gain().unwrap(),
        (-0.6_f64).exp() * 3.0_f64.cosh().powi(2),
        1e-13,
        "symmetric gain factorizes",
    );
    assert_close(
        asym_line(2.0).gain().unwrap(),
        8.6376223514443437,
        1e-10,
        "asymmetric gain",
    );
}

#[test]
fn gain_approaches_the_renormalized_exponential() {
    // At long lengths G -> e^{(2 nut - kbar) L} (1 - eps / 2 nut)^2 / 4.
    let (nu, kbar, eps) = (1.0_f64, 0.2_f64, 0.1_f64);
    let nut = (nu * nu + 0.25 * eps * eps).sqrt();
    for &(l, tol) in &[(4.0, 1e-2), (8.0, 1e-4)] {
        let cfg = DistributedConfig::uniform(nu, 1.0, l, kbar + eps, kbar - eps).unwrap();
        let approx = ((2.0 * nut - kbar) * l).exp() * (1.0 - eps / (2.0 * nut)).powi(2) / 4.0;
        assert!(
            (cfg.gain().unwrap() / approx - 1.0).abs() < tol,
            "gain ratio off at L={l}",
        );
    }
}

#[test]
fn asymmetry_raises_gain_once_the_line_is_long_enough() {
    // Asymmetry trades a smaller prefactor (1 - eps/2 nut)^2 for a larger
    // exponent 2 nut L; the exponent wins only at length. At fixed average
    // loss the ordering flips between short and long lines.
    let at = |ks: f64, ki: f64, l: f64| {
        DistributedConfig::uniform(1.0, 1.0, l, ks, ki)
            .unwrap()
            .gain()
            .unwrap()
    };
    assert!(
        at(0.2, 0.2, 3.0) > at(0.3, 0.1, 3.0),
        "short line: prefactor penalty dominates"
    );
    let (g0, g1, g2) = (at(0.2, 0.2, 45.0), at(0.3, 0.1, 45.0), at(0.4, 0.0, 45.0));
    assert!(
        g0 < g1 && g1 < g2,
        "long line: gain should grow with asymmetry: {g0}, {g1}, {g2}"
    );
}

#[test]
fn cavity_comparison_gain() {
    // nu=1, kappa_S=kappa_I=1: Q^2 = 4, sqrt(G) = 5/3.
    assert_close(
        cavity_gain_reference(1.0, 1.0, 1.0).unwrap(),
        2.7777777777777778,
        1e-13,
        "Q=2",
    );
    // Far above threshold the gain tends to one.
    let far = cavity_gain_reference(1e3, 1.0, 1.0).unwrap();
    assert!(
        far > 1.0 && far - 1.0 < 3e-6,
        "large-Q gain {far} should approach 1"
    );
    // Below threshold, asymmetry at fixed average loss raises the gain.
    let below0 = cavity_gain_reference(0.25, 1.0, 1.0).unwrap();
    let below1 = cavity_gain_reference(0.25, 1.5, 0.5).unwrap();
    assert_close(
        below0,
        2.7777777777777778,
        1e-13,
        "below-threshold symmetric",
    );
    assert_close(below1, 4.0, 1e-13, "below-threshold asymmetric");
    assert!(below1 > below0);
    // Q = 1 sits on the divergence.
    assert!(matches!(
        cavity_gain_reference(0.5, 1.0, 1.0),
        Err(Error::DivergentGain)
    ));
    assert!(matches!(
        cavity_gain_reference(1.0, 0.0, 1.0),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn added_noise_of_the_clean_line_is_half_at_high_gain() {
    let cfg = DistributedConfig::uniform(1.0, 1.0, 3.0, 0.0, 0.0).unwrap();
    // tanh^2(3) / 2: approaches 1/2 from below as the gain grows.
    assert_close(
        cfg.added_noise().unwrap(),
        0.49506698141727990,
        1e-12,
        "ideal added noise",
    );
}

#[test]
fn added_noise_asymptote_with_loss() {
    // Symmetric line at L=8: within a few 1e-6 of 1/2 + kbar/(2 nu - kbar).
    let exact = sym_line(8.0).added_noise().unwrap();
    let approx = 0.5 + 0.2 / 1.8;
    assert_rel(exact, approx, 1e-5, "symmetric added-noise asymptote");
    // The printed first-order form also covers small asymmetry and mismatch.
    for &(ks, ki, dk) in &[(0.25, 0.15, 0.0), (0.2, 0.2, 0.3), (0.25, 0.15, 0.3)] {
        let cfg = DistributedConfig::new(
            1.0,
            1.0,
            8.0,
            DecayProfile::Constant(ks),
            DecayProfile::Constant(ki),
            dk,
        )
        .unwrap();
        let eps = 0.5 * (ks - ki);
        let kbar = 0.5 * (ks + ki);
        let first_order =
            0.5 + (kbar + eps + (dk * dk - eps * eps) / (4.0 * (2.0 - kbar))) / (2.0 - kbar);
        assert!(
            (cfg.added_noise().unwrap() / first_order - 1.0).abs() < 0.02,
            "added-noise first-order form off at ks={ks}, ki={ki}, dk={dk}",
        );
    }
}

#[test]
fn added_noise_grows_with_asymmetry_and_mismatch() {
    let base = sym_line(8.0).added_noise().unwrap();
    let asym = DistributedConfig::uniform(1.0, 1.0, 8.0, 0.25, 0.15).unwrap();
    let more = DistributedConfig::uniform(1.0, 1.0, 8.0, 0.3, 0.1).unwrap();
    let na = asym.added_noise().unwrap();
    let nm = more.added_noise().unwrap();
    assert!(
        base < na && na < nm,
        "added noise should grow with asymmetry"
    );
    let mk = |dk: f64| {
        DistributedConfig::new(
            1.0,
            1.0,
            8.0,
            DecayProfile::Constant(0.2),
            DecayProfile::Constant(0.2),
            dk,
        )
        .unwrap()
        .added_noise()
        .unwrap()
    };
    assert!(
        base < mk(0.2) && mk(0.2) < mk(0.4),
        "added noise should grow with mismatch"
    );
}

#[test]
fn attenuating_lines_refuse_an_added_noise_figure() {
    let cfg = DistributedConfig::uniform(0.1, 1.0, 1.0, 8.0, 8.0).unwrap();
    match cfg.added_noise() {
        Err(Error::SubunityGain(g)) => assert!(g < 1.0),
        other => panic!("expected SubunityGain, got {other:?}"),
    }
}

#[test]
fn beamsplitter_picture_of_the_symmetric_line() {
    let eq = sym_line(1.0).lumped_equivalent().unwrap();
    assert_close(
        eq.eta,
        0.74430068461634714,
        1e-13,
        "equivalent transmission",
    );
    assert_close(
        (-2.0 * eq.r_prime).exp(),
        0.35553122530926741,
        1e-13,
        "leaked e^{-2r'}",
    );
    assert_close(eq.r_prime, 0.51707109934479115, 1e-13, "leaked squeezing");
    // Substituting back must reproduce the squeezing identically.
    for &l in &[0.3, 1.0, 2.5, 6.0] {
        let line = sym_line(l);
        let eq = line.lumped_equivalent().unwrap();
        assert_close(
            eq.squeezing(l),
            line.squeezing().unwrap(),
            1e-12,
            &format!("picture identity at L={l}"),
        );
    }
    // kbar -> 0: everything transmits and the leaked squeezing blows up.
    let clean = DistributedConfig::symmetric(1.0, 1.0, 2.0, 0.0)
        .unwrap()
        .lumped_equivalent()
        .unwrap();
    assert_close(clean.eta, 1.0, 1e-15, "lossless transmission");
    assert_close(
        (-2.0 * clean.r_prime).exp(),
        0.2,
        1e-13,
        "lossless leaked weight",
    );
    assert!(matches!(
        asym_line(1.0).lumped_equivalent(),
        Err(Error::AsymmetricInput)
    ));
}

#[test]
fn spatial_profile_squeezing_matches_uniform_closed_form() {
    for &l in &[0.5, 2.0, 10.0] {
        let line = sym_line(l);
        assert_close(
            line.spatial_profile_squeezing().unwrap(),
            line.squeezing().unwrap(),
            1e-12,
            &format!("constant profile at L={l}"),
        );
    }
    // A single full-length step is the same line.
    let stepped = DistributedConfig::new(
        1.0,
        1.0,
        2.0,
        DecayProfile::Steps(vec![(2.0, 0.2)]),
        DecayProfile::Steps(vec![(2.0, 0.2)]),
        0.0,
    )
    .unwrap();
    assert_close(
        stepped.spatial_profile_squeezing().unwrap(),
        sym_line(2.0).squeezing().unwrap(),
        1e-14,
        "one-cell step profile",
    );
    // Lossless: 2S = e^{-2 L nu / v}.
    let clean = DistributedConfig::symmetric(1.0, 1.0, 1.5, 0.0).unwrap();
    assert_close(
        clean.spatial_profile_squeezing().unwrap(),
        0.5 * (-3.0_f64).exp(),
        1e-15,
        "lossless profile",
    );
}

#[test]
fn noise_entering_near_the_output_hurts_most() {
    // Same total loss, placed early vs late along a long line: the
    // end-loaded profile squeezes less.
    let front = DistributedConfig::new(
        1.0,
        1.0,
        10.0,
        DecayProfile::Steps(vec![(5.0, 0.4), (10.0, 0.0)]),
        DecayProfile::Steps(vec![(5.0, 0.4), (10.0, 0.0)]),
        0.0,
    )
    .unwrap();
    let back = DistributedConfig::new(
        1.0,
        1.0,
        10.0,
        DecayProfile::Steps(vec![(5.0, 0.0), (10.0, 0.4)]),
        DecayProfile::Steps(vec![(5.0, 0.0), (10.0, 0.4)]),
        0.0,
    )
    .unwrap();
    let s_front = front.spatial_profile_squeezing().unwrap();
    let s_back = back.spatial_profile_squeezing().unwrap();
    assert!(
        s_back > 2.0 * s_front,
        "end-loaded loss should dominate: front {s_front}, back {s_back}"
    );
}

#[test]
fn spatial_profile_guards() {
    let uneven = DistributedConfig::new(
        1.0,
        1.0,
        2.0,
        DecayProfile::Steps(vec![(2.0, 0.2)]),
        DecayProfile::Steps(vec![(2.0, 0.3)]),
        0.0,
    )
    .unwrap();
    assert!(matches!(
        uneven.spatial_profile_squeezing(),
        Err(Error::AsymmetricInput)
    ));
    let mismatched = DistributedConfig::new(
        1.0,
        1.0,
        2.0,
        DecayProfile::Constant(0.2),
        DecayProfile::Constant(0.2),
        0.4,
    )
    .unwrap();
    assert!(matches!(
        mismatched.spatial_profile_squeezing(),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn profile_validation_rejects_malformed_cells() {
    let bad = |profile: DecayProfile| {
        DistributedConfig::new(1.0, 1.0, 2.0, profile, DecayProfile::Constant(0.1), 0.0)
    };
    assert!(matches!(
        bad(DecayProfile::Steps(vec![])),
        Err(Error::InvalidConfig(_))
    ));
    assert!(matches!(
        bad(DecayProfile::Steps(vec![(1.0, 0.1), (1.0, 0.2)])),
        Err(Error::InvalidConfig(_))
    ));
    assert!(matches!(
        bad(DecayProfile::Steps(vec![(1.0, 0.1)])),
        Err(Error::InvalidConfig(_))
    ));
    assert!(matches!(
        bad(DecayProfile::Steps(vec![(2.0, -0.1)])),
        Err(Error::InvalidConfig(_))
    ));
    assert!(matches!(
        bad(DecayProfile::Constant(-0.2)),
        Err(Error::InvalidConfig(_))
    ));
    assert!(matches!(
        DistributedConfig::uniform(0.0, 1.0, 1.0, 0.1, 0.1),
        Err(Error::InvalidConfig(_))
    ));
    assert!(matches!(
        DistributedConfig::uniform(1.0, 0.0, 1.0, 0.1, 0.1),
        Err(Error::InvalidConfig(_))
    ));
    assert!(matches!(
        DistributedConfig::uniform(1.0, 1.0, -1.0, 0.1, 0.1),
        Err(Error::InvalidConfig(_))
    ));
    assert!(matches!(
        DistributedConfig::new(
            1.0,
            1.0,
            1.0,
            DecayProfile::Constant(0.1),
            DecayProfile::Constant(0.1),
            f64::NAN,
        ),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn step_profile_lookup_and_integral() {
    let p = DecayProfile::Steps(vec![(1.0, 0.1), (3.0, 0.4)]);
    assert_close(p.rate_at(0.5), 0.1, 1e-15, "first cell");
    assert_close(
        p.rate_at(1.0),
        0.4,
        1e-15,
        "boundary belongs to the next cell",
    );
    assert_close(p.rate_at(2.9), 0.4, 1e-15, "second cell");
    assert_close(p.rate_at(5.0), 0.4, 1e-15, "extends past the last cell");
    assert_close(p.integral(0.0, 3.0), 0.1 + 0.8, 1e-15, "full integral");
    assert_close(p.integral(0.5, 2.0), 0.05 + 0.4, 1e-15, "partial integral");
    assert_close(p.integral(1.5, 1.5), 0.0, 1e-15, "empty integral");
}

#[test]
fn optimal_length_of_the_asymmetric_line() {
    let best = asym_line(6.0).optimal_length().unwrap();
    assert_close(best, 1.8674087257142544, 1e-6, "optimum length");
    let s_min = asym_line(best).squeezing().unwrap();
    assert_close(s_min, 0.060012602705754740, 1e-9, "optimum squeezing");
    // The optimum is a genuine interior minimum of the squeezing curve.
    assert!(asym_line(best - 0.3).squeezing().unwrap() > s_min);
    assert!(asym_line(best + 0.3).squeezing().unwrap() > s_min);
}

#[test]
fn optimal_length_does_not_depend_on_the_average_loss() {
    // The stationarity condition closes in the renormalized rate alone:
    // 4n(nut - n) e^{2 nut L} - 4n(nut + n) e^{-2 nut L} = 2 eps^2, so the
    // average decay rate cancels from the optimum position.
    let light = asym_line(6.0).optimal_length().unwrap();
    let heavy = DistributedConfig::uniform(1.0, 1.0, 6.0, 4.2, 4.0)
        .unwrap()
        .optimal_length()
        .unwrap();
    assert_close(
        heavy,
        light,
        1e-4,
        "optimum is independent of the loss average",
    );
}

#[test]
fn overdamped_line_still_has_a_shallow_optimum() {
    // kbar > 2 nut: every term decays, but the slowest one approaches the
    // saturation value from below, leaving a parts-per-million dip.
    let cfg = DistributedConfig::uniform(1.0, 1.0, 6.0, 4.2, 4.0).unwrap();
    let best = cfg.optimal_length().unwrap();
    let s_min = DistributedConfig::uniform(1.0, 1.0, best, 4.2, 4.0)
        .unwrap()
        .squeezing()
        .unwrap();
    assert_close(
        s_min,
        0.33612426318928783,
        1e-9,
        "overdamped optimum squeezing",
    );
    let sat = DistributedConfig::uniform(1.0, 1.0, 60.0, 4.2, 4.0)
        .unwrap()
        .squeezing()
        .unwrap();
    assert_close(
        sat - s_min,
        3.7855911999792702e-6,
        1e-9,
        "overdamped dip below saturation",
    );
}

#[test]
fn optimal_length_leading_estimate() {
    let est = asym_line(1.0).optimal_length_estimate().unwrap();
    assert_close(est, 0.80471895621705019, 1e-13, "estimate at eps=0.1");
    // The estimate drops the O(1) factor inside the log, so it only becomes
    // tight for very weak asymmetry.
    let weak = DistributedConfig::uniform(1.0, 1.0, 8.0, 0.2001, 0.1999).unwrap();
    let opt = weak.optimal_length().unwrap();
    assert_close(opt, 5.2983423602375983, 1e-5, "optimum at eps=1e-4");
    let est = weak.optimal_length_estimate().unwrap();
    assert!(
        (opt / est - 1.0).abs() < 0.3,
        "estimate {est} should sit within 30% of the optimum {opt}",
    );
}

#[test]
fn halving_the_asymmetry_stretches_the_optimum_by_half_log_two() {
    let l1 = asym_line(6.0).optimal_length().unwrap();
    let l2 = DistributedConfig::uniform(1.0, 1.0, 6.0, 0.25, 0.15)
        .unwrap()
        .optimal_length()
        .unwrap();
    let shift = l2 - l1;
    assert_close(l2, 2.2029018230257601, 1e-6, "optimum at eps=0.05");
    assert!(
        (shift / (0.5 * std::f64::consts::LN_2) - 1.0).abs() < 0.1,
        "halving shift {shift} should be close to ln(2)/2",
    );
}

#[test]
fn symmetric_lines_have_no_optimal_length() {
    assert!(matches!(
        sym_line(2.0).optimal_length(),
        Err(Error::NoMinimum)
    ));
    assert!(matches!(
        sym_line(2.0).optimal_length_estimate(),
        Err(Error::NoMinimum)
    ));
}

#[test]
fn corrected_attenuation_reference() {
    let c = asym_line(2.0).corrected().unwrap();
    assert_close(
        c.attenuation,
        0.90487507802749607,
        1e-13,
        "attenuation at eps=0.1",
    );
    assert!(!c.roles_swapped);
    let stronger = DistributedConfig::uniform(1.0, 1.0, 2.0, 0.4, 0.0)
        .unwrap()
        .corrected()
        .unwrap();
    assert_close(
        stronger.attenuation,
        0.81900248757758219,
        1e-13,
        "attenuation at eps=0.2",
    );
    // Idler lossier: same numbers, roles recorded as swapped.
    let mirrored = DistributedConfig::uniform(1.0, 1.0, 2.0, 0.1, 0.3)
        .unwrap()
        .corrected()
        .unwrap();
    assert!(mirrored.roles_swapped);
    assert_close(
        mirrored.attenuation,
        0.90487507802749607,
        1e-13,
        "mirrored attenuation",
    );
    assert_close(
        mirrored.squeezing,
        asym_line(2.0).corrected().unwrap().squeezing,
        1e-15,
        "mirrored squeezing",
    );
    // Symmetric line: the correction is a no-op.
    let noop = sym_line(2.0).corrected().unwrap();
    assert_close(noop.attenuation, 1.0, 1e-15, "no-op attenuation");
    assert_close(
        noop.squeezing,
        sym_line(2.0).squeezing().unwrap(),
        1e-15,
        "no-op squeezing",
    );
}

#[test]
fn corrected_squeezing_reference_curve() {
    assert_close(
        asym_line(1.0).corrected().unwrap().squeezing,
        0.11584044873731235,
        1e-12,
        "S_corr(L=1)",
    );
    assert_close(
        asym_line(2.0).corrected().unwrap().squeezing,
        0.073380573202377041,
        1e-12,
        "S_corr(L=2)",
    );
    assert_close(
        asym_line(5.0).corrected().unwrap().squeezing,
        0.068111598881442623,
        1e-12,
        "S_corr(L=5)",
    );
    assert_close(
        asym_line(30.0).corrected().unwrap().squeezing,
        0.068104475042194405,
        1e-12,
        "S_corr saturation",
    );
}

#[test]
fn corrected_squeezing_matches_attenuated_moments() {
    // The closed form must equal squeezing computed from moments with the
    // idler sent through the beamsplitter by hand.
    for &l in &[1.0, 2.0, 5.0] {
        let cfg = asym_line(l);
        let c = cfg.corrected().unwrap();
        let mut m = cfg.output_moments().unwrap();
        m.n_idler *= c.attenuation;
        m.anomalous *= c.attenuation.sqrt();
        assert_close(
            m.x_minus_variance(),
            c.squeezing,
            1e-9,
            &format!("attenuated-moment route at L={l}"),
        );
    }
}

#[test]
fn corrected_squeezing_is_monotone_and_stays_below_vacuum() {
    let mut prev = f64::INFINITY;
    for i in 1..=32 {
        let s = asym_line(0.5 * i as f64).corrected().unwrap().squeezing;
        assert!(s < prev, "corrected squeezing rose at L={}", 0.5 * i as f64);
        prev = s;
    }
    // Where the uncorrected line has long since blown past vacuum, the
    // corrected output still squeezes.
    assert!(asym_line(8.0).squeezing().unwrap() > 0.5);
    assert!(asym_line(8.0).corrected().unwrap().squeezing < 0.5);
}

#[test]
fn corrected_asymptote_is_cubically_accurate() {
    // Lowest-order form: symmetric renormalized curve plus the beamsplitter
    // vacuum (1 - eta)/4; residual bounded by 60 (eps/nu)^3 at long lengths.
    let (nu, kbar, l) = (1.0_f64, 0.2_f64, 12.0_f64);
    for &eps in &[0.025_f64, 0.05, 0.1, 0.2] {
        let cfg = DistributedConfig::uniform(nu, 1.0, l, kbar + eps, kbar - eps).unwrap();
        let c = cfg.corrected().unwrap();
        let nut = (nu * nu + 0.25 * eps * eps).sqrt();
        let approx = (kbar + 2.0 * nu * (-2.0 * l * nut - kbar * l).exp())
            / (2.0 * (kbar + 2.0 * nu))
            + 0.25 * (1.0 - c.attenuation);
        assert!(
            (c.squeezing - approx).abs() <= 60.0 * (eps / nu).powi(3),
            "corrected asymptote residual {} exceeds 60 eps^3 at eps={eps}",
            (c.squeezing - approx).abs(),
        );
    }
}

#[test]
fn phase_mismatch_reference_point() {
    let cfg = DistributedConfig::new(
        1.0,
        1.0,
        2.0,
        DecayProfile::Constant(0.3),
        DecayProfile::Constant(0.1),
        0.5,
    )
    .unwrap();
    let m = cfg.output_moments().unwrap();
    assert_close(m.n_signal, 8.6693247119379968, 1e-9, "mismatched n_signal");
    assert_close(m.n_idler, 9.4789020727971350, 1e-9, "mismatched n_idler");
    assert_close(
        m.anomalous.re,
        9.2388744271352527,
        1e-9,
        "mismatched anomalous re",
    );
    assert_close(
        m.anomalous.im,
        -2.2645415784927626,
        1e-9,
        "mismatched anomalous im",
    );
    assert_close(
        cfg.gain().unwrap(),
        8.0962526950028032,
        1e-10,
        "mismatched gain",
    );
    assert_close(
        cfg.squeezing().unwrap(),
        0.33523896523231319,
        1e-9,
        "mismatched squeezing",
    );
    // Mismatch degrades the balanced squeezing.
    assert!(cfg.squeezing().unwrap() > asym_line(2.0).squeezing().unwrap());
}

#[test]
fn strong_mismatch_caps_the_lossless_gain() {
    // delta_k = 2.5 at nu = 1: oscillatory regime, G = 1 + sin^2(mu L)/mu^2
    // with mu = 0.75, bounded by 25/9.
    let line = |l: f64| {
        DistributedConfig::new(
            1.0,
            1.0,
            l,
            DecayProfile::Constant(0.0),
            DecayProfile::Constant(0.0),
            2.5,
        )
        .unwrap()
    };
    assert_close(
        line(1.0).gain().unwrap(),
        1.8260113762953752,
        1e-12,
        "oscillatory gain L=1",
    );
    for i in 1..=30 {
        let g = line(0.3 * i as f64).gain().unwrap();
        assert!(
            g <= 25.0 / 9.0 + 1e-12,
            "gain {g} exceeded the mismatch cap"
        );
        assert!(g >= 1.0 - 1e-12, "lossless gain {g} dropped below unity");
    }
    // A full oscillation returns the line to unit gain.
    let period = std::f64::consts::PI / 0.75;
    assert_close(
        line(period).gain().unwrap(),
        1.0,
        1e-10,
        "gain after a full beat",
    );
}

#[test]
fn rates_and_velocity_rescale_together() {
    // (nu, kappa, v) -> (c nu, c kappa, c v) leaves the spatial problem,
    // hence every output, unchanged.
    let base = DistributedConfig::new(
        1.0,
        1.0,
        2.0,
        DecayProfile::Constant(0.3),
        DecayProfile::Constant(0.1),
        0.5,
    )
    .unwrap();
    let scaled = DistributedConfig::new(
        3.0,
        3.0,
        2.0,
        DecayProfile::Constant(0.9),
        DecayProfile::Constant(0.3),
        0.5,
    )
    .unwrap();
    let (a, b) = (
        base.output_moments().unwrap(),
        scaled.output_moments().unwrap(),
    );
    assert_rel(a.n_signal, b.n_signal, 1e-12, "scaled n_signal");
    assert_rel(a.n_idler, b.n_idler, 1e-12, "scaled n_idler");
    assert_rel(a.anomalous.re, b.anomalous.re, 1e-12, "scaled anomalous re");
    assert_rel(a.anomalous.im, b.anomalous.im, 1e-12, "scaled anomalous im");
    assert_rel(
        base.gain().unwrap(),
        scaled.gain().unwrap(),
        1e-12,
        "scaled gain",
    );
}
