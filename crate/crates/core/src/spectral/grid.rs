use crate::error::{Error, Result};

/// Default number of points per axis.
pub const DEFAULT_GRID_POINTS: usize = 512;

/// Default half-span in units of the pump width.
///
/// At `±8σ_p` the filtered amplitude at the idler edge stays below 1e-4 of its
/// peak for filter widths up to `σ_f = σ_p`.
pub const DEFAULT_SPAN_PUMP_WIDTHS: f64 = 8.0;

/// Default half-span in units of the filter width.
pub const DEFAULT_SPAN_FILTER_WIDTHS: f64 = 6.0;

/// A uniform axis of detunings, symmetric about zero.
///
/// Point `k` sits at `(k - (n-1)/2)·step`, so the axis is fully described by
/// its point count and step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    points: usize,
    step: f64,
}

impl Axis {
    pub fn new(points: usize, step: f64) -> Result<Self> {
        if points < 2 {
            return Err(Error::GridTooNarrow(format!(
                "an axis needs at least 2 points, got {points}"
            )));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::domain("step", step, "grid step must be finite and positive"));
        }
        Ok(Axis { points, step })
    }

    /// `points` samples covering `[-span, span]`.
    pub fn symmetric(span: f64, points: usize) -> Result<Self> {
        if !(span.is_finite() && span > 0.0) {
            return Err(Error::domain("span", span, "grid span must be finite and positive"));
        }
        Axis::new(points, 2.0 * span / (points.max(2) - 1) as f64)
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Largest `|Ω|` on the axis.
    pub fn span(&self) -> f64 {
        0.5 * (self.points - 1) as f64 * self.step
    }

    pub fn at(&self, k: usize) -> f64 {
        (k as f64 - 0.5 * (self.points - 1) as f64) * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.at(k)).collect()
    }

    /// Trapezoidal quadrature weight of point `k`.
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.points {
            0.5 * self.step
        } else {
            self.step
        }
    }
}

/// Signal and idler detuning axes, `Ω_s = ω_s - ω_s0` and `Ω_i = ω_i - ω_i0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    pub signal: Axis,
    pub idler: Axis,
}

impl SpectralGrid {
    pub fn new(signal: Axis, idler: Axis) -> Self {
        SpectralGrid { signal, idler }
    }

    /// The same span and resolution on both axes.
    pub fn square(span: f64, points: usize) -> Result<Self> {
        let axis = Axis::symmetric(span, points)?;
        Ok(SpectralGrid::new(axis, axis))
    }

    /// Default grid for a pump of width `sigma_pump` and a signal filter of
    /// width `sigma_filter`: `points²` samples over `±max(8σ_p, 6σ_f)`.
    pub fn for_widths(sigma_pump: f64, sigma_filter: f64, points: usize) -> Result<Self> {
        let span = (DEFAULT_SPAN_PUMP_WIDTHS * sigma_pump).max(DEFAULT_SPAN_FILTER_WIDTHS * sigma_filter);
        SpectralGrid::square(span, points)
    }

    /// `(n_i, n_s)`, the shape of amplitude matrices on this grid.
    pub fn shape(&self) -> (usize, usize) {
        (self.idler.len(), self.signal.len())
    }

    /// Same grid with both point counts multiplied by `factor`, spans kept.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let refine = |axis: &Axis| Axis::symmetric(axis.span(), (axis.len() - 1) * factor + 1);
        Ok(SpectralGrid::new(refine(&self.signal)?, refine(&self.idler)?))
    }

    pub(crate) fn ensure_same(&self, other: &SpectralGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{}x{} (dOmega {:e}, {:e}) vs {}x{} (dOmega {:e}, {:e})",
                self.idler.len(),
                self.signal.len(),
                self.idler.step(),
                self.signal.step(),
                other.idler.len(),
                other.signal.len(),
                other.idler.step(),
                other.signal.step()
            )))
        }
    }
}
