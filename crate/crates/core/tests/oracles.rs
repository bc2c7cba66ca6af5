//! Cross-checks between independent routes to the same observable.

use num_complex::Complex64;
use sfwm_core::coherence::{g2_closed_form, g2_numerical, g2_quadrature, schmidt_decompose};
use sfwm_core::dispersion::{pulse_duration, sigma_from_fwhm, FiberSpec, PulseSpec};
use sfwm_core::hom::{coincidence_curve, mode_matching_S, read_off_dip, DelayScan, HomConfig, HomOracle};
use sfwm_core::spectral::{
    build_jsa_gaussian, build_jsa_sinc, detuning, filter_amplitude, jsi, phase_match_coeffs, Axis, FilterSpec, Jsa,
    PhaseMatchCoeffs, SpectralGrid,
};

const PUMP_NM: f64 = 1538.9;
const SIGNAL_NM: f64 = 1546.9;
const IDLER_NM: f64 = 1530.9;

fn dsf() -> FiberSpec {
    FiberSpec::from_dispersion_slope("dsf", 0.3, PUMP_NM, 1538.0, 0.075).unwrap()
}

fn delta() -> f64 {
    detuning(SIGNAL_NM, IDLER_NM).unwrap()
}

fn coeffs() -> PhaseMatchCoeffs {
    phase_match_coeffs(&dsf(), delta()).unwrap()
}

fn pump(chirp: f64) -> PulseSpec {
    PulseSpec::from_fwhm(PUMP_NM, 1.0, chirp).unwrap()
}

fn sigma_s() -> f64 {
    sigma_from_fwhm(SIGNAL_NM, 0.4).unwrap()
}

fn filter(sigma: f64, chirp: f64) -> FilterSpec {
    FilterSpec::new(sigma, chirp).unwrap()
}

fn gaussian(chirp: f64, sigma_f: f64, points: usize) -> Jsa {
    let pump = pump(chirp);
    let grid = SpectralGrid::for_widths(pump.sigma, sigma_f, points).unwrap();
    build_jsa_gaussian(&pump, &coeffs(), &grid).unwrap()
}

/// Literal quadruple sum of the bunching numerator and the squared norm,
/// independent of the matrix-product route.
fn direct_g2(jsa: &Jsa, filter: &FilterSpec) -> f64 {
    let (n_i, n_s) = jsa.grid.shape();
    let a: Vec<Vec<Complex64>> = (0..n_i)
        .map(|i| {
            (0..n_s)
                .map(|s| {
                    let w = jsa.grid.idler.weight(i) * jsa.grid.signal.weight(s);
                    jsa.amplitude[(i, s)] * filter_amplitude(filter, jsa.grid.signal.at(s)) * w.sqrt()
                })
                .collect()
        })
        .collect();
    let mut numerator = 0.0;
    for s in 0..n_s {
        for t in 0..n_s {
            let mut inner = Complex64::new(0.0, 0.0);
            for i in 0..n_i {
                for j in 0..n_i {
                    inner += a[i][s].conj() * a[i][t] * a[j][s] * a[j][t].conj();
                }
            }
            numerator += inner.re;
        }
    }
    let norm: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum();
    1.0 + numerator / (norm * norm)
}

#[test]
fn quadruple_sum_matches_gram_form() {
    let sigma = sigma_s();
    for (chirp, filter_chirp) in [(0.0, 0.0), (2.0, -1.5), (-4.0, 3.0)] {
        let jsa = gaussian(chirp, sigma, 64);
        let f = filter(sigma, filter_chirp);
        let direct = direct_g2(&jsa, &f) - 1.0;
        let gram = g2_quadrature(&jsa, &f).unwrap() - 1.0;
        assert!((direct - gram).abs() <= 1e-10 * gram, "{direct} vs {gram}");
    }
}

#[test]
fn quadrature_tracks_closed_form() {
    let sigma_p = pump(0.0).sigma;
    for ratio in [0.2, 0.4, 0.8] {
        for chirp in [0.0, 1.0, -2.0, 4.0] {
            let sigma = ratio * sigma_p;
            let jsa = gaussian(chirp, sigma, 256);
            let numerical = g2_numerical(&jsa, &filter(sigma, 0.0)).unwrap();
            let closed = g2_closed_form(sigma, sigma_p, chirp);
            assert!(
                (numerical.g2 - closed).abs() <= 5e-3 * closed,
                "ratio {ratio} chirp {chirp}: {} vs {closed}",
                numerical.g2
            );
            let schmidt = schmidt_decompose(&jsa, &filter(sigma, 0.0)).unwrap();
            assert!((schmidt.g2 - numerical.g2).abs() <= 1e-3);
        }
    }
}

#[test]
fn sinc_and_gaussian_phase_matching_agree_downstream() {
    let pump = pump(0.0);
    let sigma = sigma_s();
    let grid = SpectralGrid::for_widths(pump.sigma, sigma, 256).unwrap();
    let gaussian = build_jsa_gaussian(&pump, &coeffs(), &grid).unwrap();
    let sinc = build_jsa_sinc(&pump, &dsf(), delta(), &grid).unwrap();
    let f = filter(sigma, 0.0);
    let a = g2_quadrature(&gaussian, &f).unwrap();
    let b = g2_quadrature(&sinc, &f).unwrap();
    assert!((a - b).abs() < 0.02 * a, "{a} vs {b}");
}

#[test]
fn equal_intensities_different_coherence() {
    let sigma = sigma_s();
    let flat = gaussian(0.0, sigma, 256);
    let chirped = gaussian(4.0, sigma, 256);
    let (a, b) = (jsi(&flat), jsi(&chirped));
    let scale = a.max();
    assert!(a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= 1e-15 * scale));
    let f = filter(sigma, 0.0);
    let gap = g2_quadrature(&flat, &f).unwrap() - g2_quadrature(&chirped, &f).unwrap();
    assert!(gap > 0.1, "{gap}");
}

#[test]
fn jsi_signal_marginal_is_gaussian() {
    // |F|² = exp(-(a·i² + 2b·i·s + c·s²)); integrating out the idler leaves
    // exp(-(c - b²/a)s²).
    let pump = pump(0.0);
    let k = coeffs();
    let q = 1.0 / (2.0 * pump.sigma * pump.sigma);
    let (inv_a, inv_b) = (1.0 / k.idler_bandwidth, 1.0 / k.signal_bandwidth);
    let a = q + inv_a * inv_a;
    let b = q + inv_a * inv_b;
    let c = q + inv_b * inv_b;
    let curvature = c - b * b / a;

    let grid = SpectralGrid::new(Axis::symmetric(3.0, 121).unwrap(), Axis::symmetric(8.0, 801).unwrap());
    let intensity = jsi(&build_jsa_gaussian(&pump, &k, &grid).unwrap());
    let marginal: Vec<f64> = (0..grid.signal.len())
        .map(|s| (0..grid.idler.len()).map(|i| grid.idler.weight(i) * intensity[(i, s)]).sum())
        .collect();
    let centre = marginal[grid.signal.len() / 2];
    for (s, value) in marginal.iter().enumerate() {
        let omega = grid.signal.at(s);
        let expected = (-curvature * omega * omega).exp();
        assert!((value / centre - expected).abs() < 1e-8, "Ω_s = {omega}");
    }
}

#[test]
fn refinement_is_stable() {
    let sigma = sigma_s();
    let f = filter(sigma, 0.0);
    for chirp in [0.0, 2.0] {
        let pump = pump(chirp);
        let grid = SpectralGrid::for_widths(pump.sigma, sigma, 256).unwrap();
        let coarse = g2_quadrature(&build_jsa_gaussian(&pump, &coeffs(), &grid).unwrap(), &f).unwrap();
        let fine_grid = grid.refined(2).unwrap();
        let fine = g2_quadrature(&build_jsa_gaussian(&pump, &coeffs(), &fine_grid).unwrap(), &f).unwrap();
        assert!((coarse - fine).abs() < 1e-4 * fine, "{coarse} vs {fine}");
    }
}

struct Interferometer {
    jsa: Jsa,
    pump_duration: f64,
    g2: f64,
    sigma: f64,
}

fn interferometer(points: usize) -> Interferometer {
    let chirp = 0.825;
    let pump = pump(chirp);
    let sigma = sigma_s();
    Interferometer {
        jsa: gaussian(chirp, sigma, points),
        pump_duration: pulse_duration(&pump),
        g2: g2_closed_form(sigma, pump.sigma, chirp),
        sigma,
    }
}

#[test]
fn oracle_follows_analytic_dip() {
    let setup = interferometer(256);
    for (c1, c2) in [(0.0, 0.0), (-1.07, -1.07), (-1.0, 1.0)] {
        let (f1, f2) = (filter(setup.sigma, c1), filter(setup.sigma, c2));
        let config = HomConfig::balanced(f1, f2, setup.pump_duration, setup.g2).unwrap();
        let analytic = coincidence_curve(&config).unwrap();
        let oracle = HomOracle::new(&setup.jsa, &setup.jsa, &f1, &f2).unwrap();
        let numerical = oracle.curve(&config.scan, 1.0, 0.5);
        for ((dt, a), (_, n)) in analytic.curve.iter().zip(&numerical) {
            assert!((a - n).abs() < 0.01 * a, "chirps ({c1}, {c2}) at {dt} ps: {a} vs {n}");
        }
        let far = oracle.normalized_coincidence(50.0, 1.0, 0.5);
        assert!((far - analytic.asymptote).abs() < 0.01 * analytic.asymptote);
    }
}

#[test]
fn oracle_mode_matching_tracks_formula() {
    let setup = interferometer(256);
    let (f1, f2) = (filter(setup.sigma, -1.05), filter(setup.sigma, 1.05));
    let config = HomConfig::balanced(f1, f2, setup.pump_duration, setup.g2).unwrap();
    let formula = mode_matching_S(&config);
    let oracle = HomOracle::new(&setup.jsa, &setup.jsa, &f1, &f2).unwrap();
    let (g2, _) = oracle.beam_g2();
    // Dip depth relative to the matched case measures S directly.
    let matched = HomOracle::new(&setup.jsa, &setup.jsa, &f1, &f1).unwrap();
    let depth = |o: &HomOracle| o.normalized_coincidence(60.0, 1.0, 0.5) - o.normalized_coincidence(0.0, 1.0, 0.5);
    let ratio = depth(&oracle) / depth(&matched);
    assert!((ratio - formula).abs() < 0.02 * formula, "{ratio} vs {formula}");
    assert!((oracle.mode_matching() - formula).abs() < 0.02 * formula);
    assert!(g2 > 1.9 && g2 < 2.0);
}

#[test]
fn matched_chirps_do_not_matter() {
    let setup = interferometer(128);
    let scan = DelayScan::default();
    let plain = HomOracle::new(&setup.jsa, &setup.jsa, &filter(setup.sigma, 0.0), &filter(setup.sigma, 0.0)).unwrap();
    let chirped = HomOracle::new(&setup.jsa, &setup.jsa, &filter(setup.sigma, -1.2), &filter(setup.sigma, -1.2)).unwrap();
    for ((_, a), (_, b)) in plain.curve(&scan, 1.0, 0.5).iter().zip(&chirped.curve(&scan, 1.0, 0.5)) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn oracle_curve_is_even_and_readable() {
    let setup = interferometer(128);
    let (f1, f2) = (filter(setup.sigma, -1.0), filter(setup.sigma, 1.0));
    let oracle = HomOracle::new(&setup.jsa, &setup.jsa, &f1, &f2).unwrap();
    for dt in [0.5, 3.0, 11.0, 27.5] {
        let (a, b) = (oracle.normalized_coincidence(dt, 1.0, 0.5), oracle.normalized_coincidence(-dt, 1.0, 0.5));
        assert!((a - b).abs() < 1e-12 * a);
    }
    let config = HomConfig::balanced(f1, f2, setup.pump_duration, setup.g2).unwrap();
    let analytic = coincidence_curve(&config).unwrap();
    let readout = read_off_dip(&analytic.curve).unwrap();
    assert!((readout.fwhm_ps - analytic.fwhm_ps).abs() < config.scan.step_ps);
    assert!((readout.visibility - analytic.visibility).abs() < 1e-3);
}
