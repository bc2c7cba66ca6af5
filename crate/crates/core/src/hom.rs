//! Hong-Ou-Mandel interference of two independently generated signal beams.
//!
//! Beam 1 is delayed by `δτ` and scaled in amplitude by `η` before both meet
//! on a lossless splitter with intensity reflectivity `R` (`T = 1 - R`). Each
//! beam is individually thermal with bunching `g2`. The analytic model gives
//! the coincidence rate normalised by the product of single rates:
//!
//! ```text
//! N₁₂/(N₁N₂) = 1 + TR(1 + η⁴)(g2 - 1)/[(η²T + R)(η²R + T)] · [1 - S·2η²ξ(δτ)/(1 + η⁴)]
//! ξ(δτ)      = exp(-δτ²σ_s²(g2 - 1)²S²/2)
//! ```
//!
//! with the temporal mode-matching factor `S` set by the chirps of the two
//! beams. [`HomOracle`] evaluates the same quantity from the filtered joint
//! spectral amplitudes by quadrature, without any of those closed forms.

use std::f64::consts::LN_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::coherence::{gram, traces, weighted_filtered};
use crate::error::{ensure_positive, Error, Result};
use crate::spectral::{FilterSpec, Jsa};

/// Delay scan, symmetric about zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayScan {
    pub span_ps: f64,
    pub step_ps: f64,
}

impl Default for DelayScan {
    fn default() -> Self {
        DelayScan {
            span_ps: 40.0,
            step_ps: 0.5,
        }
    }
}

impl DelayScan {
    pub fn new(span_ps: f64, step_ps: f64) -> Result<Self> {
        ensure_positive("delay span", span_ps)?;
        ensure_positive("delay step", step_ps)?;
        Ok(DelayScan { span_ps, step_ps })
    }

    /// Delays `(k - (n-1)/2)·step`, with `n` chosen so the scan reaches the
    /// span. An exact multiple of the step includes `δτ = 0`.
    pub fn delays(&self) -> Vec<f64> {
        let half = (self.span_ps / self.step_ps).round().max(1.0) as usize;
        (0..=2 * half)
            .map(|k| (k as f64 - half as f64) * self.step_ps)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomConfig {
    pub filter1: FilterSpec,
    pub filter2: FilterSpec,
    /// Pump pulse duration entering the mode-matching factor, ps.
    pub pump_duration_ps: f64,
    /// Bunching of each signal beam.
    pub g2: f64,
    /// Amplitude ratio of beam 1 to beam 2 at the splitter.
    pub eta: f64,
    pub reflectivity: f64,
    pub scan: DelayScan,
}

impl HomConfig {
    /// A balanced interferometer (`η = 1`, `R = T = ½`) with the default
    /// scan.
    pub fn balanced(filter1: FilterSpec, filter2: FilterSpec, pump_duration_ps: f64, g2: f64) -> Result<Self> {
        let config = HomConfig {
            filter1,
            filter2,
            pump_duration_ps,
            g2,
            eta: 1.0,
            reflectivity: 0.5,
            scan: DelayScan::default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("filter1 sigma", self.filter1.sigma)?;
        let (a, b) = (self.filter1.sigma, self.filter2.sigma);
        if (a - b).abs() > 1e-12 * a.max(b) {
            return Err(Error::domain(
                "filter2 sigma",
                b,
                "both beams must share the filter bandwidth",
            ));
        }
        if !(self.pump_duration_ps.is_finite() && self.pump_duration_ps >= 0.0) {
            return Err(Error::domain(
                "pump_duration_ps",
                self.pump_duration_ps,
                "must be finite and non-negative",
            ));
        }
        if !(1.0..=2.0).contains(&self.g2) {
            return Err(Error::domain("g2", self.g2, "thermal bunching lies in [1, 2]"));
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(Error::domain("eta", self.eta, "must be finite and non-negative"));
        }
        if !(0.0..=1.0).contains(&self.reflectivity) {
            return Err(Error::domain(
                "reflectivity",
                self.reflectivity,
                "lossless splitter needs 0 <= R <= 1",
            ));
        }
        Ok(())
    }

    pub fn transmissivity(&self) -> f64 {
        1.0 - self.reflectivity
    }

    /// Coherence time `τ_s = 1/σ_s`.
    pub fn coherence_time(&self) -> f64 {
        self.filter1.coherence_time()
    }

    /// Far-delay offset above the accidental level,
    /// `TR(1 + η⁴)(g2 - 1)/[(η²T + R)(η²R + T)]`.
    fn bunching_excess(&self) -> f64 {
        let (r, t, e2) = (self.reflectivity, self.transmissivity(), self.eta * self.eta);
        let denominator = (e2 * t + r) * (e2 * r + t);
        if denominator == 0.0 {
            return 0.0;
        }
        t * r * (1.0 + e2 * e2) * (self.g2 - 1.0) / denominator
    }

    /// Fraction of the excess removed at full overlap, `2η²/(1 + η⁴)`.
    fn overlap_weight(&self) -> f64 {
        let e2 = self.eta * self.eta;
        2.0 * e2 / (1.0 + e2 * e2)
    }
}

/// Observables of an analytic HOM dip.
#[derive(Debug, Clone, PartialEq)]
pub struct HomResult {
    pub mode_matching: f64,
    pub visibility: f64,
    /// Infinite when there is no dip (`g2 = 1`).
    pub fwhm_ps: f64,
    pub asymptote: f64,
    pub minimum: f64,
    /// `(δτ in ps, N₁₂/(N₁N₂))`.
    pub curve: Vec<(f64, f64)>,
}

/// `S = sqrt[(τ_s² + ΔT_p²/2) / (τ_s² + τ_s²(C₁′ - C₂′)²/4 + ΔT_p²/2)]`.
pub fn mode_matching(coherence_time: f64, pump_duration_ps: f64, chirp1: f64, chirp2: f64) -> f64 {
    let tau2 = coherence_time * coherence_time;
    let matched = tau2 + 0.5 * pump_duration_ps * pump_duration_ps;
    let dc = chirp1 - chirp2;
    (matched / (matched + 0.25 * tau2 * dc * dc)).sqrt()
}

/// Mode-matching factor of a configured interferometer.
#[allow(non_snake_case)]
pub fn mode_matching_S(config: &HomConfig) -> f64 {
    mode_matching(
        config.coherence_time(),
        config.pump_duration_ps,
        config.filter1.chirp,
        config.filter2.chirp,
    )
}

/// `ξ(δτ) = exp(-δτ²σ_s²(g2 - 1)²S²/2)`.
pub fn dip_envelope(delta_tau: f64, sigma_s: f64, g2: f64, s: f64) -> f64 {
    let x = delta_tau * sigma_s * (g2 - 1.0) * s;
    (-0.5 * x * x).exp()
}

/// Dip FWHM `Δτ = 2sqrt(2ln2)/[(g2 - 1)σ_s S]`, ps.
pub fn fwhm(sigma_s: f64, g2: f64, s: f64) -> Result<f64> {
    ensure_positive("sigma_s", sigma_s)?;
    if !(g2 > 1.0 && s > 0.0) || !g2.is_finite() || !s.is_finite() {
        return Err(Error::NoDip { g2, s });
    }
    Ok(2.0 * (2.0 * LN_2).sqrt() / ((g2 - 1.0) * sigma_s * s))
}

/// Visibility of a balanced interferometer, `V = (g2 - 1)S/(g2 + 1)`.
pub fn visibility(g2: f64, s: f64) -> f64 {
    (g2 - 1.0) * s / (g2 + 1.0)
}

/// Analytic normalised coincidence at one delay for a given `S`.
pub fn analytic_coincidence(config: &HomConfig, s: f64, delta_tau: f64) -> f64 {
    let xi = dip_envelope(delta_tau, config.filter1.sigma, config.g2, s);
    1.0 + config.bunching_excess() * (1.0 - s * config.overlap_weight() * xi)
}

/// Analytic coincidence curve over the configured delay scan, with `S`,
/// visibility and FWHM.
pub fn coincidence_curve(config: &HomConfig) -> Result<HomResult> {
    config.validate()?;
    let s = mode_matching_S(config);
    let curve = config
        .scan
        .delays()
        .into_iter()
        .map(|dt| (dt, analytic_coincidence(config, s, dt)))
        .collect();
    let excess = config.bunching_excess();
    let asymptote = 1.0 + excess;
    let minimum = 1.0 + excess * (1.0 - s * config.overlap_weight());
    let fwhm_ps = fwhm(config.filter1.sigma, config.g2, s).unwrap_or(f64::INFINITY);
    Ok(HomResult {
        mode_matching: s,
        visibility: (asymptote - minimum) / asymptote,
        fwhm_ps,
        asymptote,
        minimum,
        curve,
    })
}

/// Visibility and FWHM read off a sampled dip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipReadout {
    pub maximum: f64,
    pub minimum: f64,
    pub visibility: f64,
    pub fwhm_ps: f64,
}

/// Reads the dip off a curve: extreme values, and the half-depth crossings
/// on either side of the minimum located by linear interpolation. `None`
/// when the curve is flat or a crossing lies outside the scan.
pub fn read_off_dip(curve: &[(f64, f64)]) -> Option<DipReadout> {
    let (lowest, &(_, minimum)) = curve.iter().enumerate().min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))?;
    let maximum = curve.iter().map(|p| p.1).fold(f64::MIN, f64::max);
    if !(maximum > minimum) {
        return None;
    }
    let half = 0.5 * (maximum + minimum);
    let crossing = |(a, b): (&(f64, f64), &(f64, f64))| {
        let (lo, hi) = if a.1 <= b.1 { (a, b) } else { (b, a) };
        (lo.1 <= half && hi.1 >= half).then(|| {
            let t = if hi.1 == lo.1 { 0.0 } else { (half - lo.1) / (hi.1 - lo.1) };
            lo.0 + t * (hi.0 - lo.0)
        })
    };
    let left = curve[..=lowest].windows(2).rev().find_map(|w| crossing((&w[0], &w[1])))?;
    let right = curve[lowest..].windows(2).find_map(|w| crossing((&w[0], &w[1])))?;
    Some(DipReadout {
        maximum,
        minimum,
        visibility: (maximum - minimum) / maximum,
        fwhm_ps: right - left,
    })
}

/// Grid-quadrature HOM model built from the field operators of the two
/// filtered beams.
///
/// With `ρ_k(s,s') = ∫di M_k*(i,s)M_k(i,s')` and the delay applied as a phase
/// `e^{iΩ_sδτ}` on beam 1, the normalised coincidence is
///
/// ```text
/// 1 + RT[η⁴Tr(ρ₁²) + Tr(ρ₂²) - 2η² Re X(δτ)] / (N₁N₂)
/// X(δτ) = ∫ds ds' ρ₁*(s,s')ρ₂(s,s') e^{i(s - s')δτ}
/// N₁ = η²T Tr ρ₁ + R Tr ρ₂,   N₂ = η²R Tr ρ₁ + T Tr ρ₂
/// ```
#[derive(Debug, Clone)]
pub struct HomOracle {
    signal_detunings: Vec<f64>,
    /// `conj(ρ₁) ⊙ ρ₂`, quadrature weights included.
    overlap: DMatrix<Complex64>,
    trace1: f64,
    trace2: f64,
    purity1: f64,
    purity2: f64,
}

impl HomOracle {
    pub fn new(jsa1: &Jsa, jsa2: &Jsa, filter1: &FilterSpec, filter2: &FilterSpec) -> Result<Self> {
        jsa1.grid.ensure_same(&jsa2.grid)?;
        let rho1 = gram(&weighted_filtered(jsa1, Some(filter1))?);
        let rho2 = gram(&weighted_filtered(jsa2, Some(filter2))?);
        let (trace1, purity1) = traces(&rho1);
        let (trace2, purity2) = traces(&rho2);
        Ok(HomOracle {
            signal_detunings: jsa1.grid.signal.values(),
            overlap: rho1.zip_map(&rho2, |a, b| a.conj() * b),
            trace1,
            trace2,
            purity1,
            purity2,
        })
    }

    /// `g2` of each beam on its own.
    pub fn beam_g2(&self) -> (f64, f64) {
        (
            1.0 + self.purity1 / (self.trace1 * self.trace1),
            1.0 + self.purity2 / (self.trace2 * self.trace2),
        )
    }

    /// `Re X(δτ)`.
    pub fn overlap(&self, delta_tau: f64) -> f64 {
        let phases = DVector::from_iterator(
            self.signal_detunings.len(),
            self.signal_detunings
                .iter()
                .map(|omega| Complex64::from_polar(1.0, omega * delta_tau)),
        );
        let conjugate = phases.map(|z| z.conj());
        phases.dot(&(&self.overlap * conjugate)).re
    }

    /// Mode matching seen by the quadrature, `Re X(0)/sqrt(Tr ρ₁² Tr ρ₂²)`.
    pub fn mode_matching(&self) -> f64 {
        self.overlap(0.0) / (self.purity1 * self.purity2).sqrt()
    }

    pub fn normalized_coincidence(&self, delta_tau: f64, eta: f64, reflectivity: f64) -> f64 {
        let (r, t, e2) = (reflectivity, 1.0 - reflectivity, eta * eta);
        let singles1 = e2 * t * self.trace1 + r * self.trace2;
        let singles2 = e2 * r * self.trace1 + t * self.trace2;
        let interference = e2 * e2 * self.purity1 + self.purity2 - 2.0 * e2 * self.overlap(delta_tau);
        1.0 + r * t * interference / (singles1 * singles2)
    }

    pub fn curve(&self, scan: &DelayScan, eta: f64, reflectivity: f64) -> Vec<(f64, f64)> {
        scan.delays()
            .into_iter()
            .map(|dt| (dt, self.normalized_coincidence(dt, eta, reflectivity)))
            .collect()
    }
}

/// Normalised coincidence at one delay by grid quadrature.
pub fn hom_numerical(
    jsa1: &Jsa,
    jsa2: &Jsa,
    filter1: &FilterSpec,
    filter2: &FilterSpec,
    delta_tau: f64,
    eta: f64,
    reflectivity: f64,
) -> Result<f64> {
    Ok(HomOracle::new(jsa1, jsa2, filter1, filter2)?.normalized_coincidence(delta_tau, eta, reflectivity))
}
