//! Fiber dispersion bookkeeping: dispersion coefficients, chirp accumulated
//! along chains of fiber, and conversions between spectral widths and pulse
//! durations.
//!
//! Units are fixed across the crate: wavelengths in nm, angular frequencies
//! in rad/ps, times in ps, lengths in km, `beta2` in ps²/km and `beta3` in
//! ps³/km. A Gaussian field of spectral width `sigma` and chirp `C` has the
//! amplitude spectrum `exp(-Ω²(1 + iC) / (2σ²))`.

use std::f64::consts::{LN_2, PI};

use crate::error::{ensure_positive, Error, Result};

/// Speed of light in nm/ps.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e5;

/// Gaussian time-bandwidth constant used by the autocorrelator relation.
pub const TIME_BANDWIDTH_PRODUCT: f64 = 0.44;

/// Relative tolerance for `beta2`/`beta3` against the values derived from the
/// zero-dispersion wavelength and dispersion slope.
const DERIVED_BETA_TOLERANCE: f64 = 1e-12;

/// One segment of fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSpec {
    pub name: String,
    pub length_km: f64,
    /// ps²/km, signed.
    pub beta2: f64,
    /// ps³/km.
    pub beta3: f64,
    /// Zero-dispersion wavelength, nm.
    pub zero_dispersion_nm: Option<f64>,
    /// Dispersion slope, ps/(nm²·km).
    pub dispersion_slope: Option<f64>,
    /// Nonlinear coefficient, 1/(W·km).
    pub gamma: Option<f64>,
    /// Peak pump power, W.
    pub peak_power_w: Option<f64>,
}

impl FiberSpec {
    /// A purely dispersive segment with no third-order dispersion.
    pub fn new(name: impl Into<String>, length_km: f64, beta2: f64) -> Self {
        FiberSpec {
            name: name.into(),
            length_km,
            beta2,
            beta3: 0.0,
            zero_dispersion_nm: None,
            dispersion_slope: None,
            gamma: None,
            peak_power_w: None,
        }
    }

    /// A fiber whose `beta2` and `beta3` at `pump_nm` follow from its
    /// zero-dispersion wavelength and dispersion slope (see [`derive_beta`]).
    pub fn from_dispersion_slope(
        name: impl Into<String>,
        length_km: f64,
        pump_nm: f64,
        zero_dispersion_nm: f64,
        dispersion_slope: f64,
    ) -> Result<Self> {
        let (beta2, beta3) = derive_beta(pump_nm, zero_dispersion_nm, dispersion_slope)?;
        let fiber = FiberSpec {
            zero_dispersion_nm: Some(zero_dispersion_nm),
            dispersion_slope: Some(dispersion_slope),
            beta3,
            ..FiberSpec::new(name, length_km, beta2)
        };
        fiber.validate(Some(pump_nm))?;
        Ok(fiber)
    }

    pub fn with_beta3(mut self, beta3: f64) -> Self {
        self.beta3 = beta3;
        self
    }

    pub fn with_nonlinearity(mut self, gamma: f64, peak_power_w: f64) -> Self {
        self.gamma = Some(gamma);
        self.peak_power_w = Some(peak_power_w);
        self
    }

    /// `2γP_p` in rad/km; zero when either factor is absent.
    pub fn nonlinear_phase_rate(&self) -> f64 {
        match (self.gamma, self.peak_power_w) {
            (Some(gamma), Some(power)) => 2.0 * gamma * power,
            _ => 0.0,
        }
    }

    /// Checks the length and, when both the zero-dispersion wavelength and the
    /// slope are present and `pump_nm` is known, that `beta2`/`beta3` agree
    /// with the derived values.
    pub fn validate(&self, pump_nm: Option<f64>) -> Result<()> {
        if !(self.length_km.is_finite() && self.length_km >= 0.0) {
            return Err(Error::domain(
                "length_km",
                self.length_km,
                "fiber length must be finite and non-negative",
            ));
        }
        if !self.beta2.is_finite() {
            return Err(Error::domain("beta2", self.beta2, "must be finite"));
        }
        if !self.beta3.is_finite() {
            return Err(Error::domain("beta3", self.beta3, "must be finite"));
        }
        if let (Some(zero), Some(slope), Some(pump)) =
            (self.zero_dispersion_nm, self.dispersion_slope, pump_nm)
        {
            let (beta2, beta3) = derive_beta(pump, zero, slope)?;
            let scale2 = beta2.abs().max(beta3.abs() * f64::EPSILON);
            if (self.beta2 - beta2).abs() > DERIVED_BETA_TOLERANCE * scale2 {
                return Err(Error::domain(
                    "beta2",
                    self.beta2,
                    "inconsistent with zero-dispersion wavelength and slope",
                ));
            }
            if (self.beta3 - beta3).abs() > DERIVED_BETA_TOLERANCE * beta3.abs() {
                return Err(Error::domain(
                    "beta3",
                    self.beta3,
                    "inconsistent with dispersion slope",
                ));
            }
        }
        Ok(())
    }

    /// Chirp this segment adds to a field of spectral width `sigma`.
    pub fn chirp_increment(&self, sigma: f64) -> f64 {
        self.beta2 * self.length_km * sigma * sigma
    }
}

/// A Gaussian pulsed field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub center_nm: f64,
    /// Amplitude 1/e half-width of `exp(-Ω²/(2σ²))`, rad/ps.
    pub sigma: f64,
    pub chirp: f64,
}

impl PulseSpec {
    pub fn new(center_nm: f64, sigma: f64, chirp: f64) -> Result<Self> {
        ensure_positive("center_nm", center_nm)?;
        ensure_positive("sigma", sigma)?;
        if !chirp.is_finite() {
            return Err(Error::domain("chirp", chirp, "must be finite"));
        }
        Ok(PulseSpec {
            center_nm,
            sigma,
            chirp,
        })
    }

    /// Builds the pulse from an intensity FWHM given in nm.
    pub fn from_fwhm(center_nm: f64, fwhm_nm: f64, chirp: f64) -> Result<Self> {
        PulseSpec::new(center_nm, sigma_from_fwhm(center_nm, fwhm_nm)?, chirp)
    }

    pub fn with_chirp(self, chirp: f64) -> Self {
        PulseSpec { chirp, ..self }
    }

    /// The same spectrum after propagating through `chain`.
    pub fn propagate(self, chain: &[FiberSpec]) -> Self {
        self.with_chirp(accumulate_chirp(self.chirp, self.sigma, chain))
    }

    /// `T₀ = 1/σ`, the duration at zero chirp.
    pub fn transform_limited_duration(&self) -> f64 {
        self.sigma.recip()
    }

    /// `sqrt(1 + C²)`, the broadening factor.
    pub fn broadening(&self) -> f64 {
        self.chirp.hypot(1.0)
    }
}

/// Second- and third-order dispersion at `pump_nm` for a fiber with
/// zero-dispersion wavelength `zero_dispersion_nm` and slope
/// `dispersion_slope` (ps/(nm²·km)).
///
/// `beta2 = -(λ²/2πc)·D_slope·(λ - λ₀)` and `beta3 = (λ²/2πc)²·D_slope`, so
/// `beta2` is negative (anomalous) whenever the pump sits on the long side of
/// the zero-dispersion wavelength.
pub fn derive_beta(pump_nm: f64, zero_dispersion_nm: f64, dispersion_slope: f64) -> Result<(f64, f64)> {
    ensure_positive("pump_nm", pump_nm)?;
    ensure_positive("zero_dispersion_nm", zero_dispersion_nm)?;
    ensure_positive("dispersion_slope", dispersion_slope)?;
    let k = pump_nm * pump_nm / (2.0 * PI * SPEED_OF_LIGHT);
    let beta2 = -k * dispersion_slope * (pump_nm - zero_dispersion_nm);
    let beta3 = k * k * dispersion_slope;
    Ok((beta2, beta3))
}

/// Converts an intensity FWHM in wavelength into the amplitude width `σ` of
/// `exp(-Ω²/(2σ²))`: `σ = 2πc·Δλ/λ² / (2√ln2)`.
pub fn sigma_from_fwhm(center_nm: f64, fwhm_nm: f64) -> Result<f64> {
    ensure_positive("center_nm", center_nm)?;
    ensure_positive("fwhm_nm", fwhm_nm)?;
    let fwhm_omega = 2.0 * PI * SPEED_OF_LIGHT * fwhm_nm / (center_nm * center_nm);
    Ok(fwhm_omega / (2.0 * LN_2.sqrt()))
}

/// Angular frequency of a wavelength, rad/ps.
pub fn angular_frequency(wavelength_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / wavelength_nm
}

/// Chirp after propagating through `chain`: `C_in + Σ β₂·z·σ²`.
///
/// Linear propagation leaves the spectrum untouched, so `sigma` is the same
/// for every segment.
pub fn accumulate_chirp(initial_chirp: f64, sigma: f64, chain: &[FiberSpec]) -> f64 {
    chain
        .iter()
        .fold(initial_chirp, |chirp, fiber| chirp + fiber.chirp_increment(sigma))
}

/// `ΔT = sqrt(1 + C²)·T₀` with `T₀ = 1/σ`, ps.
pub fn pulse_duration(pulse: &PulseSpec) -> f64 {
    pulse.broadening() * pulse.transform_limited_duration()
}

/// Autocorrelator duration of a pulse with intensity FWHM `fwhm_nm`:
/// `0.44·λ²·sqrt(1 + C²) / (2√ln2·c·Δλ)`.
pub fn autocorrelator_duration(center_nm: f64, fwhm_nm: f64, chirp: f64) -> Result<f64> {
    ensure_positive("center_nm", center_nm)?;
    ensure_positive("fwhm_nm", fwhm_nm)?;
    Ok(TIME_BANDWIDTH_PRODUCT * center_nm * center_nm * chirp.hypot(1.0)
        / (2.0 * LN_2.sqrt() * SPEED_OF_LIGHT * fwhm_nm))
}

/// Inverts [`autocorrelator_duration`] for `|C|`.
///
/// Durations shorter than the transform limit cannot come from any chirp and
/// are rejected; a relative shortfall below 1e-12 is treated as rounding.
pub fn chirp_from_measured_duration(center_nm: f64, fwhm_nm: f64, measured_ps: f64) -> Result<f64> {
    ensure_positive("measured_duration", measured_ps)?;
    let limit = autocorrelator_duration(center_nm, fwhm_nm, 0.0)?;
    let ratio = measured_ps / limit;
    if ratio < 1.0 - 1e-12 {
        return Err(Error::Infeasible {
            measured: measured_ps,
            limit,
        });
    }
    Ok((ratio * ratio - 1.0).max(0.0).sqrt())
}
