//! Models for photon pairs from pulse-pumped spontaneous four-wave mixing in
//! fiber, with chromatic-dispersion chirp on the pump and on the individual
//! beams.
//!
//! - [`dispersion`]: dispersion coefficients, chirp accumulation, pulse
//!   durations.
//! - [`spectral`]: joint spectral amplitude (Gaussian and exact-sinc phase
//!   matching), joint spectral intensity, chirped filters.
//! - [`coherence`]: `g2` of a filtered individual beam by closed form,
//!   quadrature and Schmidt decomposition; general-process formulas; photon
//!   statistics.
//! - [`hom`]: Hong-Ou-Mandel dip of two independent beams, analytic and by
//!   quadrature.
//!
//! ```
//! use sfwm_core::coherence::g2_closed_form;
//! use sfwm_core::dispersion::sigma_from_fwhm;
//!
//! let sigma_p = sigma_from_fwhm(1538.9, 1.0)?;
//! let sigma_s = sigma_from_fwhm(1546.9, 0.4)?;
//! let g2 = g2_closed_form(sigma_s, sigma_p, 0.0);
//! assert!((g2 - 1.963).abs() < 1e-3);
//! # Ok::<(), sfwm_core::Error>(())
//! ```

pub mod coherence;
pub mod dispersion;
mod error;
pub mod hom;
pub mod spectral;

pub use error::{Error, Result};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/dispersion.md")]
    struct Dispersion;
    #[doc = include_str!("../../../book/src/spectral.md")]
    struct Spectral;
    #[doc = include_str!("../../../book/src/coherence.md")]
    struct Coherence;
    #[doc = include_str!("../../../book/src/hom.md")]
    struct Hom;
}
