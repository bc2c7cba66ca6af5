//! Two-photon joint spectral amplitude (JSA) of pulse-pumped four-wave
//! mixing, its intensity, and the chirped Gaussian filters applied to the
//! individual beams.
//!
//! Amplitude matrices are indexed `[idler, signal]` and stored unnormalised:
//! every observable computed from them is a ratio.

mod dump;
mod grid;

pub use dump::{read_dump, write_dump};
pub use grid::{Axis, SpectralGrid, DEFAULT_GRID_POINTS, DEFAULT_SPAN_FILTER_WIDTHS, DEFAULT_SPAN_PUMP_WIDTHS};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dispersion::{angular_frequency, sigma_from_fwhm, FiberSpec, PulseSpec};
use crate::error::{ensure_positive, Error, Result};

/// Numerator of the Gaussian phase-matching bandwidths. It matches the
/// amplitude FWHM of `sinc(ΔK·L/2)` to that of `exp(-x²/2)`.
pub const PHASE_MATCH_WIDTH_FACTOR: f64 = 6.44;

/// Largest tolerated edge-to-peak modulus ratio of an amplitude on its grid.
pub const TRUNCATION_LIMIT: f64 = 1e-4;

/// The idler axis must cover at least this many pump widths.
const MIN_SPAN_PUMP_WIDTHS: f64 = 4.0;

/// Below this `|x|` the sinc is evaluated from its Taylor series.
const SINC_SERIES_THRESHOLD: f64 = 1e-4;

/// Gaussian phase-matching bandwidths: `A` along the idler detuning, `B`
/// along the signal detuning, and the signed centre-frequency difference
/// `Δ = ω_s0 - ω_i0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMatchCoeffs {
    pub idler_bandwidth: f64,
    pub signal_bandwidth: f64,
    pub delta: f64,
}

impl PhaseMatchCoeffs {
    /// Both bandwidths infinite: the pump envelope alone shapes the JSA.
    pub fn unlimited(delta: f64) -> Self {
        PhaseMatchCoeffs {
            idler_bandwidth: f64::INFINITY,
            signal_bandwidth: f64::INFINITY,
            delta,
        }
    }

    /// Exchanges the roles of signal and idler.
    pub fn swapped(self) -> Self {
        PhaseMatchCoeffs {
            idler_bandwidth: self.signal_bandwidth,
            signal_bandwidth: self.idler_bandwidth,
            delta: -self.delta,
        }
    }
}

/// Chirped Gaussian filter `f(Ω) = exp(-Ω²(1 + iC′)/(2σ²))`. The chirp stands
/// for the dispersion the filtered beam meets in its transmission fiber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub sigma: f64,
    pub chirp: f64,
}

impl FilterSpec {
    pub fn new(sigma: f64, chirp: f64) -> Result<Self> {
        ensure_positive("filter sigma", sigma)?;
        if !chirp.is_finite() {
            return Err(Error::domain("filter chirp", chirp, "must be finite"));
        }
        Ok(FilterSpec { sigma, chirp })
    }

    pub fn from_fwhm(center_nm: f64, fwhm_nm: f64, chirp: f64) -> Result<Self> {
        FilterSpec::new(sigma_from_fwhm(center_nm, fwhm_nm)?, chirp)
    }

    pub fn with_chirp(self, chirp: f64) -> Self {
        FilterSpec { chirp, ..self }
    }

    /// The filtered beam after propagating through `chain`.
    pub fn propagate(self, chain: &[FiberSpec]) -> Self {
        self.with_chirp(crate::dispersion::accumulate_chirp(self.chirp, self.sigma, chain))
    }

    /// Coherence time `τ = 1/σ`, ps.
    pub fn coherence_time(&self) -> f64 {
        self.sigma.recip()
    }
}

/// A joint spectral amplitude sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Jsa {
    pub grid: SpectralGrid,
    /// `n_i × n_s`, row = idler detuning, column = signal detuning.
    pub amplitude: DMatrix<Complex64>,
}

impl Jsa {
    pub fn new(grid: SpectralGrid, amplitude: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = grid.shape();
        if amplitude.shape() != (rows, cols) {
            return Err(Error::GridMismatch(format!(
                "amplitude is {}x{}, grid is {rows}x{cols}",
                amplitude.nrows(),
                amplitude.ncols()
            )));
        }
        Ok(Jsa { grid, amplitude })
    }

    /// Samples `f(Ω_i, Ω_s)` on `grid`.
    pub fn from_fn(grid: SpectralGrid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let (rows, cols) = grid.shape();
        let amplitude = DMatrix::from_fn(rows, cols, |i, s| f(grid.idler.at(i), grid.signal.at(s)));
        Jsa { grid, amplitude }
    }

    pub fn max_modulus(&self) -> f64 {
        max_modulus(&self.amplitude)
    }

    /// Largest modulus on the grid edge divided by the largest modulus
    /// anywhere.
    pub fn boundary_ratio(&self) -> f64 {
        boundary_ratio(&self.amplitude)
    }

    /// `f(Ω_s)·F(Ω_i, Ω_s)`: the amplitude seen behind a filter on the signal
    /// beam.
    pub fn filtered(&self, filter: &FilterSpec) -> DMatrix<Complex64> {
        let weights: Vec<Complex64> = self
            .grid
            .signal
            .values()
            .into_iter()
            .map(|omega| filter_amplitude(filter, omega))
            .collect();
        let mut product = self.amplitude.clone();
        for (mut column, weight) in product.column_iter_mut().zip(&weights) {
            column *= *weight;
        }
        product
    }

    /// Signal and idler exchanged: the transpose on the swapped grid.
    pub fn transposed(&self) -> Jsa {
        Jsa {
            grid: SpectralGrid::new(self.grid.idler, self.grid.signal),
            amplitude: self.amplitude.transpose(),
        }
    }
}

pub(crate) fn max_modulus(matrix: &DMatrix<Complex64>) -> f64 {
    matrix.iter().fold(0.0, |acc: f64, z| acc.max(z.norm()))
}

pub(crate) fn boundary_ratio(matrix: &DMatrix<Complex64>) -> f64 {
    let (rows, cols) = matrix.shape();
    let peak = max_modulus(matrix);
    if peak == 0.0 {
        return 0.0;
    }
    let mut edge: f64 = 0.0;
    for i in 0..rows {
        edge = edge.max(matrix[(i, 0)].norm()).max(matrix[(i, cols - 1)].norm());
    }
    for s in 0..cols {
        edge = edge.max(matrix[(0, s)].norm()).max(matrix[(rows - 1, s)].norm());
    }
    edge / peak
}

/// `Δ = ω_s0 - ω_i0` for the given centre wavelengths, rad/ps.
pub fn detuning(signal_nm: f64, idler_nm: f64) -> Result<f64> {
    ensure_positive("signal_nm", signal_nm)?;
    ensure_positive("idler_nm", idler_nm)?;
    Ok(angular_frequency(signal_nm) - angular_frequency(idler_nm))
}

/// Phase mismatch of the four-wave mixing process, rad/km:
///
/// `ΔK ≈ 2γP_p + (β₂/4)Δ² + (β₂/2)Δ(Ω_s - Ω_i) + (β₃/8)Δ²(Ω_s + Ω_i)`.
pub fn phase_mismatch(fiber: &FiberSpec, delta: f64, omega_s: f64, omega_i: f64) -> f64 {
    let (b2, b3) = (fiber.beta2, fiber.beta3);
    fiber.nonlinear_phase_rate()
        + 0.25 * b2 * delta * delta
        + 0.5 * b2 * delta * (omega_s - omega_i)
        + 0.125 * b3 * delta * delta * (omega_s + omega_i)
}

/// Gaussian phase-matching bandwidths of `fiber` at detuning `delta`:
///
/// `A = 6.44/[L(β₃Δ²/4 - β₂Δ)]`, `B = 6.44/[L(β₃Δ²/4 + β₂Δ)]`.
///
/// Both must come out positive; a vanishing denominator is a singular
/// configuration and a negative one means the Gaussian model does not apply.
pub fn phase_match_coeffs(fiber: &FiberSpec, delta: f64) -> Result<PhaseMatchCoeffs> {
    let length = ensure_positive("length_km", fiber.length_km)?;
    let common = 0.25 * fiber.beta3 * delta * delta;
    let linear = fiber.beta2 * delta;
    let bandwidth = |denominator: f64, label: &str| -> Result<f64> {
        let scaled = length * denominator;
        if scaled == 0.0 || !scaled.is_finite() {
            return Err(Error::SingularConfiguration(format!(
                "{label} denominator L(β₃Δ²/4 ∓ β₂Δ) = {scaled:e}"
            )));
        }
        if scaled < 0.0 {
            return Err(Error::SingularConfiguration(format!(
                "{label} bandwidth would be negative ({:e} rad/ps)",
                PHASE_MATCH_WIDTH_FACTOR / scaled
            )));
        }
        Ok(PHASE_MATCH_WIDTH_FACTOR / scaled)
    };
    Ok(PhaseMatchCoeffs {
        idler_bandwidth: bandwidth(common - linear, "idler (A)")?,
        signal_bandwidth: bandwidth(common + linear, "signal (B)")?,
        delta,
    })
}

/// `sin(x)/x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_SERIES_THRESHOLD {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Chirped pump envelope on the sum detuning,
/// `exp[-(1 + iC_p)(Ω_i + Ω_s)²/(4σ_p²)]`.
pub fn pump_envelope(pump: &PulseSpec, sum_detuning: f64) -> Complex64 {
    let x = sum_detuning * sum_detuning / (4.0 * pump.sigma * pump.sigma);
    Complex64::new(-x, -pump.chirp * x).exp()
}

/// Gaussian-approximated phase matching, `exp[-½(Ω_i/A + Ω_s/B)²]`.
pub fn gaussian_phase_matching(coeffs: &PhaseMatchCoeffs, omega_i: f64, omega_s: f64) -> f64 {
    let x = omega_i / coeffs.idler_bandwidth + omega_s / coeffs.signal_bandwidth;
    (-0.5 * x * x).exp()
}

/// Gaussian-model JSA at one point.
pub fn gaussian_jsa_at(pump: &PulseSpec, coeffs: &PhaseMatchCoeffs, omega_i: f64, omega_s: f64) -> Complex64 {
    pump_envelope(pump, omega_i + omega_s) * gaussian_phase_matching(coeffs, omega_i, omega_s)
}

/// Exact-sinc JSA at one point, `envelope · sinc(ΔK·L/2)`.
pub fn sinc_jsa_at(pump: &PulseSpec, fiber: &FiberSpec, delta: f64, omega_i: f64, omega_s: f64) -> Complex64 {
    let mismatch = phase_mismatch(fiber, delta, omega_s, omega_i);
    pump_envelope(pump, omega_i + omega_s) * sinc(0.5 * mismatch * fiber.length_km)
}

fn check_pump_coverage(pump: &PulseSpec, grid: &SpectralGrid) -> Result<()> {
    let needed = MIN_SPAN_PUMP_WIDTHS * pump.sigma;
    if grid.idler.span() < needed {
        return Err(Error::GridTooNarrow(format!(
            "idler axis spans ±{:.4} rad/ps, the pump envelope needs ±{needed:.4}",
            grid.idler.span()
        )));
    }
    Ok(())
}

/// Samples the Gaussian-model JSA
/// `exp[-(1 + iC_p)(Ω_i + Ω_s)²/(4σ_p²)]·exp[-½(Ω_i/A + Ω_s/B)²]`.
pub fn build_jsa_gaussian(pump: &PulseSpec, coeffs: &PhaseMatchCoeffs, grid: &SpectralGrid) -> Result<Jsa> {
    check_pump_coverage(pump, grid)?;
    Ok(Jsa::from_fn(*grid, |oi, os| gaussian_jsa_at(pump, coeffs, oi, os)))
}

/// Samples the JSA with the exact `sinc(ΔK·L/2)` phase matching.
pub fn build_jsa_sinc(pump: &PulseSpec, fiber: &FiberSpec, delta: f64, grid: &SpectralGrid) -> Result<Jsa> {
    check_pump_coverage(pump, grid)?;
    ensure_positive("length_km", fiber.length_km)?;
    Ok(Jsa::from_fn(*grid, |oi, os| sinc_jsa_at(pump, fiber, delta, oi, os)))
}

/// Joint spectral intensity `|F|²`. Any pump chirp is invisible here.
pub fn jsi(jsa: &Jsa) -> DMatrix<f64> {
    jsa.amplitude.map(|z| z.norm_sqr())
}

/// `f(Ω) = exp[-Ω²(1 + iC′)/(2σ²)]`.
pub fn filter_amplitude(filter: &FilterSpec, omega: f64) -> Complex64 {
    let x = omega * omega / (2.0 * filter.sigma * filter.sigma);
    Complex64::new(-x, -filter.chirp * x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::derive_beta;
    use approx::assert_relative_eq;

    fn reference_dsf() -> FiberSpec {
        FiberSpec::from_dispersion_slope("DSF", 0.3, 1538.9, 1538.0, 0.075).unwrap()
    }

    fn reference_delta() -> f64 {
        detuning(1546.9, 1530.9).unwrap()
    }

    #[test]
    fn mismatch_trivial_cases() {
        let fiber = reference_dsf();
        assert_eq!(phase_mismatch(&fiber, 0.0, 0.3, -0.7), 0.0);
        let nonlinear = FiberSpec::new("x", 1.0, -0.1).with_nonlinearity(2.0, 1.0);
        assert_eq!(phase_mismatch(&nonlinear, 0.0, 0.0, 0.0), 4.0);
    }

    #[test]
    fn mismatch_at_reference_centre() {
        let fiber = reference_dsf();
        let delta = reference_delta();
        assert!((delta.abs() - 12.7).abs() < 0.05, "Δ = {delta}");
        let dk = phase_mismatch(&fiber, delta, 0.0, 0.0);
        // hand evaluation: β₂Δ²/4 with β₂ ≈ -0.0849, Δ² ≈ 162
        assert_relative_eq!(dk, 0.25 * fiber.beta2 * delta * delta, max_relative = 1e-15);
        assert!((dk - (-3.44)).abs() < 0.02, "ΔK = {dk}");
        // half the phase-matching phase at the grid centre stays well below π
        assert!((0.5 * dk * fiber.length_km).abs() < 0.2 * std::f64::consts::PI);
    }

    #[test]
    fn reference_bandwidths() {
        let coeffs = phase_match_coeffs(&reference_dsf(), reference_delta()).unwrap();
        let (a, b) = (coeffs.idler_bandwidth, coeffs.signal_bandwidth);
        // Δ < 0 (signal is red of the idler): A ≈ 5.77, B ≈ 3.65
        assert!((a - 5.77).abs() < 0.05, "A = {a}");
        assert!((b - 3.65).abs() < 0.05, "B = {b}");
        assert!(a.min(b) > 7.0 * 0.478);
        // the opposite sign of Δ exchanges the two
        let flipped = phase_match_coeffs(&reference_dsf(), -reference_delta()).unwrap();
        assert_relative_eq!(flipped.idler_bandwidth, b, max_relative = 1e-12);
        assert_relative_eq!(flipped.signal_bandwidth, a, max_relative = 1e-12);
    }

    #[test]
    fn bandwidth_symmetry_and_scaling() {
        let (_, beta3) = derive_beta(1538.9, 1538.0, 0.075).unwrap();
        let fiber = FiberSpec::new("zero", 0.3, 0.0).with_beta3(beta3);
        let coeffs = phase_match_coeffs(&fiber, 12.7).unwrap();
        assert_eq!(coeffs.idler_bandwidth, coeffs.signal_bandwidth);

        let short = phase_match_coeffs(&reference_dsf(), reference_delta()).unwrap();
        let mut long_fiber = reference_dsf();
        long_fiber.length_km *= 2.0;
        let long = phase_match_coeffs(&long_fiber, reference_delta()).unwrap();
        assert_relative_eq!(long.idler_bandwidth, 0.5 * short.idler_bandwidth, max_relative = 1e-14);
        assert_relative_eq!(long.signal_bandwidth, 0.5 * short.signal_bandwidth, max_relative = 1e-14);
    }

    #[test]
    fn singular_and_negative_bandwidths_are_rejected() {
        let fiber = FiberSpec::new("flat", 0.3, 0.0);
        assert!(matches!(
            phase_match_coeffs(&fiber, 12.0),
            Err(Error::SingularConfiguration(_))
        ));
        // strong normal dispersion drives one denominator negative
        let normal = FiberSpec::new("normal", 0.3, 2.0).with_beta3(0.1);
        assert!(phase_match_coeffs(&normal, 12.0).is_err());
    }

    #[test]
    fn sinc_behaviour() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(std::f64::consts::PI).abs() < 1e-15);
        for x in [1e-5, 5e-5, 9.9e-5, 1.01e-4, 1e-3] {
            assert_relative_eq!(sinc(x), x.sin() / x, max_relative = 1e-15);
        }
    }

    #[test]
    fn sinc_factor_is_one_on_phase_matched_line() {
        let fiber = reference_dsf();
        let delta = reference_delta();
        let pump = PulseSpec::new(1538.9, 0.478, 0.0).unwrap();
        // ΔK is affine in (Ω_s, Ω_i); walk along ΔK = 0 through Ω_i = 0
        let c0 = phase_mismatch(&fiber, delta, 0.0, 0.0);
        let ds = phase_mismatch(&fiber, delta, 1.0, 0.0) - c0;
        let di = phase_mismatch(&fiber, delta, 0.0, 1.0) - c0;
        for oi in [-0.5, 0.0, 0.7] {
            let os = -(c0 + di * oi) / ds;
            let value = sinc_jsa_at(&pump, &fiber, delta, oi, os);
            assert_relative_eq!(value.re, pump_envelope(&pump, oi + os).re, max_relative = 1e-12);
        }
        // first zero where ΔK·L/2 = π
        let os = (2.0 * std::f64::consts::PI / fiber.length_km - c0) / ds;
        assert!(sinc_jsa_at(&pump, &fiber, delta, 0.0, os).norm() < 1e-14);
    }

    #[test]
    fn antidiagonal_drops_pump_envelope() {
        let pump = PulseSpec::new(1538.9, 0.478, 1.3).unwrap();
        let coeffs = PhaseMatchCoeffs {
            idler_bandwidth: 3.6,
            signal_bandwidth: 5.7,
            delta: 12.7,
        };
        let sp = pump.sigma;
        let off = gaussian_jsa_at(&pump, &coeffs, sp, -sp).norm();
        let centre = gaussian_jsa_at(&pump, &coeffs, 0.0, 0.0).norm();
        let expected = centre * (-0.5 * (sp / 3.6 - sp / 5.7).powi(2)).exp();
        assert_relative_eq!(off, expected, max_relative = 1e-14);
    }

    #[test]
    fn unchirped_jsa_is_real_and_ridge_only_without_phase_matching() {
        let pump = PulseSpec::new(1538.9, 0.478, 0.0).unwrap();
        let grid = SpectralGrid::square(8.0 * 0.478, 33).unwrap();
        let jsa = build_jsa_gaussian(&pump, &PhaseMatchCoeffs::unlimited(12.7), &grid).unwrap();
        let peak = jsa.max_modulus();
        assert!(jsa.amplitude.iter().all(|z| z.im.abs() < 1e-12 * peak));
        // depends on Ω_i + Ω_s only: constant along antidiagonals
        for i in 1..33 {
            assert_eq!(jsa.amplitude[(i, 32 - i)], jsa.amplitude[(0, 32)]);
        }
    }

    #[test]
    fn jsi_ignores_pump_chirp() {
        let grid = SpectralGrid::square(3.0, 48).unwrap();
        let coeffs = PhaseMatchCoeffs {
            idler_bandwidth: 5.8,
            signal_bandwidth: 3.6,
            delta: -12.7,
        };
        let base = PulseSpec::new(1538.9, 0.478, 0.0).unwrap();
        let plain = build_jsa_gaussian(&base, &coeffs, &grid).unwrap();
        let chirped = build_jsa_gaussian(&base.with_chirp(5.0), &coeffs, &grid).unwrap();
        let (a, b) = (jsi(&plain), jsi(&chirped));
        let peak = a.max();
        assert!(a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= 1e-15 * peak));
        for (x, y) in plain.amplitude.iter().zip(chirped.amplitude.iter()) {
            assert_relative_eq!(x.norm(), y.norm(), max_relative = 1e-13);
        }
    }

    #[test]
    fn jsi_of_real_amplitude_is_square() {
        let grid = SpectralGrid::square(1.0, 8).unwrap();
        let jsa = Jsa::from_fn(grid, |oi, os| Complex64::new(1.0 + oi * os, 0.0));
        let intensity = jsi(&jsa);
        for (z, w) in jsa.amplitude.iter().zip(intensity.iter()) {
            assert_eq!(*w, z.re * z.re);
        }
    }

    #[test]
    fn exchange_maps_a_to_b() {
        let grid = SpectralGrid::square(3.0, 40).unwrap();
        let pump = PulseSpec::new(1538.9, 0.478, 2.0).unwrap();
        let coeffs = PhaseMatchCoeffs {
            idler_bandwidth: 3.6,
            signal_bandwidth: 5.7,
            delta: 12.7,
        };
        let forward = build_jsa_gaussian(&pump, &coeffs, &grid).unwrap();
        let swapped = build_jsa_gaussian(&pump, &coeffs.swapped(), &grid).unwrap();
        assert_eq!(forward.transposed().amplitude, swapped.amplitude);
    }

    #[test]
    fn filter_examples() {
        let filter = FilterSpec::new(1.0, 0.0).unwrap();
        assert_eq!(filter_amplitude(&filter, 0.0), Complex64::new(1.0, 0.0));
        assert_eq!(filter_amplitude(&filter.with_chirp(2.5), 0.0), Complex64::new(1.0, 0.0));
        assert_relative_eq!(filter_amplitude(&filter, 1.0).re, (-0.5f64).exp(), max_relative = 1e-15);
        for omega in [-2.0, -0.3, 0.4, 1.7] {
            let plain = filter_amplitude(&filter, omega).norm();
            let chirped = filter_amplitude(&filter.with_chirp(3.0), omega).norm();
            assert_relative_eq!(plain, chirped, max_relative = 1e-14);
        }
        assert!(FilterSpec::new(0.0, 0.0).is_err());
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let pump = PulseSpec::new(1538.9, 0.478, 0.0).unwrap();
        let grid = SpectralGrid::square(3.0 * 0.478, 32).unwrap();
        assert!(matches!(
            build_jsa_gaussian(&pump, &PhaseMatchCoeffs::unlimited(1.0), &grid),
            Err(Error::GridTooNarrow(_))
        ));
    }

    #[test]
    fn boundary_ratio_of_filtered_product() {
        let pump = PulseSpec::new(1538.9, 0.478, 0.0).unwrap();
        let grid = SpectralGrid::for_widths(0.478, 0.189, 128).unwrap();
        let jsa = build_jsa_gaussian(&pump, &PhaseMatchCoeffs::unlimited(1.0), &grid).unwrap();
        // the pump ridge alone never decays along the antidiagonal
        assert!(jsa.boundary_ratio() > 0.5);
        let filtered = jsa.filtered(&FilterSpec::new(0.189, 1.0).unwrap());
        assert!(boundary_ratio(&filtered) < TRUNCATION_LIMIT);
    }
}
