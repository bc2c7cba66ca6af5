//! Temporal coherence of a filtered individual beam.
//!
//! The intensity correlation of the signal beam behind a filter `f` is
//!
//! ```text
//! g2 = 1 + ∫ds ds' |∫di f(s)F*(i,s) f(s')F(i,s')|² / (∫ds di |f(s)F(i,s)|²)²
//! ```
//!
//! which is `1 + Tr(ρ²)/Tr(ρ)²` for the reduced signal state
//! `ρ(s,s') = ∫di M*(i,s)M(i,s')` with `M = f·F`. Three routes are provided
//! and cross-checked in the tests: the Gaussian closed form, quadrature of the
//! expression above through the Gram matrix `M†M`, and the Schmidt weights
//! from a singular value decomposition of `M`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{ensure_positive, Error, Result};
use crate::spectral::{boundary_ratio, FilterSpec, Jsa, TRUNCATION_LIMIT};

/// Schmidt weights below this fraction of the leading weight are dropped.
pub const SCHMIDT_WEIGHT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceResult {
    pub g2: f64,
    pub schmidt_number: f64,
    pub purity: f64,
    /// Descending, normalised to unit sum.
    pub schmidt_weights: Vec<f64>,
}

impl CoherenceResult {
    fn from_weights(weights: Vec<f64>, g2: Option<f64>) -> Self {
        let purity: f64 = weights.iter().map(|w| w * w).sum();
        CoherenceResult {
            g2: g2.unwrap_or(1.0 + purity),
            schmidt_number: purity.recip(),
            purity,
            schmidt_weights: weights,
        }
    }
}

/// `g2 = 1 + 1/sqrt(1 + σ_s²(1 + C_p²)/(2σ_p²))`, valid when the phase-matching
/// bandwidths are much wider than the filter.
pub fn g2_closed_form(sigma_s: f64, sigma_p: f64, pump_chirp: f64) -> f64 {
    let ratio = sigma_s / sigma_p;
    1.0 + (1.0 + 0.5 * ratio * ratio * (1.0 + pump_chirp * pump_chirp)).sqrt().recip()
}

/// Filtered amplitude with the trapezoidal weights folded in, so that plain
/// matrix sums are quadratures.
pub(crate) fn weighted_filtered(jsa: &Jsa, filter: Option<&FilterSpec>) -> Result<DMatrix<Complex64>> {
    let mut m = match filter {
        Some(filter) => jsa.filtered(filter),
        None => jsa.amplitude.clone(),
    };
    let (rows, cols) = m.shape();
    for s in 0..cols {
        for i in 0..rows {
            if !m[(i, s)].is_finite() {
                return Err(Error::NonFinite { row: i, col: s });
            }
        }
    }
    let ratio = boundary_ratio(&m);
    if ratio > TRUNCATION_LIMIT {
        return Err(Error::Truncation {
            ratio,
            limit: TRUNCATION_LIMIT,
        });
    }
    let grid = &jsa.grid;
    let row_scale: Vec<f64> = (0..rows).map(|i| grid.idler.weight(i).sqrt()).collect();
    for s in 0..cols {
        let col_scale = grid.signal.weight(s).sqrt();
        for i in 0..rows {
            m[(i, s)] *= row_scale[i] * col_scale;
        }
    }
    Ok(m)
}

/// `M†M`, computed as four real products.
pub(crate) fn gram(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    // `transpose() *` goes through the blocked GEMM kernel; `tr_mul` does not.
    let (re_t, im_t) = (re.transpose(), im.transpose());
    let real = &re_t * &re + &im_t * &im;
    let imag = &re_t * &im - &im_t * &re;
    real.zip_map(&imag, Complex64::new)
}

/// `Tr(ρ)` and `Tr(ρ²)` of a Hermitian matrix.
pub(crate) fn traces(rho: &DMatrix<Complex64>) -> (f64, f64) {
    let trace: f64 = rho.diagonal().iter().map(|z| z.re).sum();
    let squared: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
    (trace, squared)
}

/// Zeroes entries below `floor` times the largest modulus. Subnormal inputs
/// can stall the eigen and singular value iterations into NaN, and anything
/// this small is invisible in the weights anyway.
fn flush_tiny(mut m: DMatrix<Complex64>, floor: f64) -> DMatrix<Complex64> {
    let largest = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cut = floor * largest;
    m.iter_mut().filter(|z| z.norm() < cut).for_each(|z| *z = Complex64::new(0.0, 0.0));
    m
}

fn normalised_weights(values: impl IntoIterator<Item = f64>) -> Option<Vec<f64>> {
    let mut weights: Vec<f64> = values.into_iter().map(|v| v.max(0.0)).collect();
    weights.sort_by(|a, b| b.total_cmp(a));
    let leading = *weights.first()?;
    if !(leading > 0.0) || !leading.is_finite() {
        return None;
    }
    weights.retain(|w| *w >= SCHMIDT_WEIGHT_FLOOR * leading);
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Some(weights)
}

fn decomposition_error(jsa: &Jsa, reason: &'static str) -> Error {
    let (rows, cols) = jsa.grid.shape();
    Error::Decomposition {
        rows,
        cols,
        step_i: jsa.grid.idler.step(),
        step_s: jsa.grid.signal.step(),
        reason,
    }
}

/// `g2` of the filtered beam by quadrature alone, without the Schmidt data.
pub fn g2_quadrature(jsa: &Jsa, filter: &FilterSpec) -> Result<f64> {
    let m = weighted_filtered(jsa, Some(filter))?;
    let (trace, squared) = traces(&gram(&m));
    if !(trace > 0.0) {
        return Err(decomposition_error(jsa, "filtered amplitude has zero norm"));
    }
    Ok(1.0 + squared / (trace * trace))
}

/// `g2` of the filtered beam by trapezoidal quadrature on the JSA grid, with
/// the Schmidt weights taken from the eigenvalues of the reduced state.
///
/// Fails when the filtered amplitude is still above [`TRUNCATION_LIMIT`] of
/// its peak on the grid edge or holds non-finite entries.
pub fn g2_numerical(jsa: &Jsa, filter: &FilterSpec) -> Result<CoherenceResult> {
    let m = weighted_filtered(jsa, Some(filter))?;
    let rho = gram(&m);
    let (trace, squared) = traces(&rho);
    if !(trace > 0.0) {
        return Err(decomposition_error(jsa, "filtered amplitude has zero norm"));
    }
    let eigenvalues = flush_tiny(rho, f64::EPSILON * f64::EPSILON).symmetric_eigenvalues();
    let weights = normalised_weights(eigenvalues.iter().copied())
        .ok_or_else(|| decomposition_error(jsa, "reduced state has no positive eigenvalue"))?;
    Ok(CoherenceResult::from_weights(weights, Some(1.0 + squared / (trace * trace))))
}

/// Drops all-zero rows and columns, which only add zero singular values.
fn without_zero_lines(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let rows: Vec<usize> = (0..m.nrows()).filter(|&i| m.row(i).iter().any(|z| *z != zero)).collect();
    let cols: Vec<usize> = (0..m.ncols()).filter(|&s| m.column(s).iter().any(|z| *z != zero)).collect();
    if rows.len() == m.nrows() && cols.len() == m.ncols() || rows.is_empty() {
        return m;
    }
    DMatrix::from_fn(rows.len(), cols.len(), |i, s| m[(rows[i], cols[s])])
}

fn schmidt_of(jsa: &Jsa, m: DMatrix<Complex64>) -> Result<CoherenceResult> {
    let m = without_zero_lines(flush_tiny(m, f64::EPSILON));
    let svd = nalgebra::SVD::try_new(m, false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| decomposition_error(jsa, "SVD did not converge"))?;
    let weights = normalised_weights(svd.singular_values.iter().map(|s| s * s))
        .ok_or_else(|| decomposition_error(jsa, "all singular values vanish"))?;
    Ok(CoherenceResult::from_weights(weights, None))
}

/// Schmidt decomposition of the filtered amplitude `f(Ω_s)F(Ω_i, Ω_s)`.
///
/// The singular values `s_k` of the quadrature-weighted matrix give the
/// weights `λ_k = s_k²/Σs_j²`; purity is `Σλ_k²`, the Schmidt number its
/// inverse, and `g2 = 1 + purity`.
pub fn schmidt_decompose(jsa: &Jsa, filter: &FilterSpec) -> Result<CoherenceResult> {
    schmidt_of(jsa, weighted_filtered(jsa, Some(filter))?)
}

/// Schmidt decomposition of the bare JSA. The grid must be wide enough for
/// the amplitude to decay along the antidiagonal as well.
pub fn schmidt_unfiltered(jsa: &Jsa) -> Result<CoherenceResult> {
    schmidt_of(jsa, weighted_filtered(jsa, None)?)
}

/// Which beam a general-process formula refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Beam {
    Signal,
    Idler,
}

/// Parametric process; the discriminant is the pump-width factor `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Process {
    DownConversion = 1,
    FourWaveMixing = 2,
}

impl Process {
    pub fn pump_factor(self) -> f64 {
        self as i32 as f64
    }
}

/// `g2` of an individual beam for a general pulse-pumped process with
/// phase-matching bandwidths `A′` (signal band) and `B′` (idler band).
///
/// For the signal beam:
///
/// ```text
/// g2 = 1 + sqrt(1 + aσ_p²/A′² + σ²(1/A′ - 1/B′)²)
///        / sqrt(1 + aσ_p²/A′² + σ²/A′² + (σ²/B′²)(1 + aσ_p²/A′²) + σ²(1 + C_p²)/(aσ_p²))
/// ```
///
/// The idler formula exchanges `A′` and `B′`.
pub fn g2_general(
    beam: Beam,
    sigma_filter: f64,
    sigma_p: f64,
    pump_chirp: f64,
    a_prime: f64,
    b_prime: f64,
    process: Process,
) -> f64 {
    let (own, other) = match beam {
        Beam::Signal => (a_prime, b_prime),
        Beam::Idler => (b_prime, a_prime),
    };
    let a = process.pump_factor();
    let s2 = sigma_filter * sigma_filter;
    let pump_term = a * sigma_p * sigma_p / (own * own);
    let mismatch = own.recip() - other.recip();
    let numerator = 1.0 + pump_term + s2 * mismatch * mismatch;
    let denominator = 1.0
        + pump_term
        + s2 / (own * own)
        + s2 / (other * other) * (1.0 + pump_term)
        + s2 / (a * sigma_p * sigma_p) * (1.0 + pump_chirp * pump_chirp);
    1.0 + (numerator / denominator).sqrt()
}

/// Photon-number statistics of an individual beam in the two extreme cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeStructure {
    /// Single-mode thermal: Bose-Einstein.
    SingleMode,
    /// Highly multimode thermal: Poisson.
    HighlyMultimode,
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Probability of `n` photons for mean `mean_photons`.
///
/// Single-mode: `n̄ⁿ/(1 + n̄)ⁿ⁺¹`. Highly multimode: `e^{-n̄}n̄ⁿ/n!`.
pub fn photon_statistics(mean_photons: f64, mode: ModeStructure, n: u32) -> Result<f64> {
    if !(mean_photons.is_finite() && mean_photons >= 0.0) {
        return Err(Error::domain("mean_photons", mean_photons, "must be finite and non-negative"));
    }
    if mean_photons == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let n_f = n as f64;
    let ln_p = match mode {
        ModeStructure::SingleMode => n_f * mean_photons.ln() - (n_f + 1.0) * mean_photons.ln_1p(),
        ModeStructure::HighlyMultimode => n_f * mean_photons.ln() - mean_photons - ln_factorial(n),
    };
    Ok(ln_p.exp())
}

/// `⟨n(n-1)⟩/⟨n⟩²` of a photon-number distribution given as `P(0), P(1), ...`.
pub fn g2_from_distribution(probabilities: &[f64]) -> Result<f64> {
    let (mean, factorial) = probabilities
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(m, f), (n, p)| {
            let n = n as f64;
            (m + n * p, f + n * (n - 1.0) * p)
        });
    ensure_positive("mean photon number", mean)?;
    Ok(factorial / (mean * mean))
}
