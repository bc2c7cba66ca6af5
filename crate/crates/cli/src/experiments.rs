//! The pipelines behind each subcommand.
//!
//! Every run starts from a [`Setup`]: the configuration turned into model
//! inputs (widths, dispersion, phase-matching bandwidths) with the
//! approximation-validity checks recorded as warnings.

use std::f64::consts::FRAC_PI_4;

use sfwm_core::coherence::{g2_closed_form, g2_numerical, g2_quadrature, schmidt_decompose};
use sfwm_core::dispersion::{
    accumulate_chirp, autocorrelator_duration, pulse_duration, sigma_from_fwhm, FiberSpec, PulseSpec,
};
use sfwm_core::hom::{coincidence_curve, DelayScan, HomConfig, HomOracle, HomResult};
use sfwm_core::spectral::{
    build_jsa_gaussian, build_jsa_sinc, detuning, phase_match_coeffs, phase_mismatch, FilterSpec, Jsa,
    PhaseMatchCoeffs, SpectralGrid, TRUNCATION_LIMIT,
};

use crate::config::{ExperimentConfig, PhaseMatching, SegmentSection, SweepVariable};
use crate::report::{Cell, Plot, RunReport, Table};
use crate::RunError;

/// Phase-matching bandwidths narrower than this many pump (or filter)
/// widths trigger a validity warning.
const BANDWIDTH_MARGIN: f64 = 5.0;

/// Closed form and quadrature further apart than this are reported.
const G2_AGREEMENT: f64 = 5e-3;

/// Numerical and analytic interference curves further apart than this are
/// reported.
const HOM_AGREEMENT: f64 = 1e-2;

pub struct Setup {
    pub config: ExperimentConfig,
    pub dsf: FiberSpec,
    /// `ω_s0 - ω_i0`, rad/ps.
    pub delta: f64,
    pub coeffs: PhaseMatchCoeffs,
    pub sigma_p: f64,
    pub sigma_s: f64,
    pub sigma_i: f64,
    pub warnings: Vec<String>,
}

impl Setup {
    pub fn new(config: &ExperimentConfig) -> Result<Self, RunError> {
        let pump_nm = config.pump.center_nm;
        let mut dsf = FiberSpec::from_dispersion_slope(
            "dsf",
            config.dsf.length_km,
            pump_nm,
            config.dsf.zero_dispersion_nm,
            config.dsf.dispersion_slope_ps_per_nm2_km,
        )?;
        if let (Some(gamma), Some(power)) = (config.dsf.gamma_per_w_km, config.dsf.peak_power_w) {
            dsf = dsf.with_nonlinearity(gamma, power);
        }
        let delta = detuning(config.signal_filter.center_nm, config.idler_filter.center_nm)?;
        let coeffs = phase_match_coeffs(&dsf, delta)?;
        let sigma_p = sigma_from_fwhm(pump_nm, config.pump.fwhm_nm)?;
        let sigma_s = sigma_from_fwhm(config.signal_filter.center_nm, config.signal_filter.fwhm_nm)?;
        let sigma_i = sigma_from_fwhm(config.idler_filter.center_nm, config.idler_filter.fwhm_nm)?;

        let mut warnings = config.warnings.clone();
        if coeffs.idler_bandwidth < BANDWIDTH_MARGIN * sigma_p {
            warnings.push(format!(
                "idler phase-matching bandwidth A = {:.4} rad/ps is not much wider than the pump width {sigma_p:.4} rad/ps",
                coeffs.idler_bandwidth
            ));
        }
        if coeffs.signal_bandwidth < BANDWIDTH_MARGIN * sigma_s {
            warnings.push(format!(
                "signal filter width {sigma_s:.4} rad/ps is not much narrower than the phase-matching bandwidth B = {:.4} rad/ps",
                coeffs.signal_bandwidth
            ));
        }
        let centre_phase = 0.5 * phase_mismatch(&dsf, delta, 0.0, 0.0) * dsf.length_km;
        if config.model.phase_matching == PhaseMatching::Sinc && centre_phase.abs() > FRAC_PI_4 {
            warnings.push(format!(
                "phase mismatch at the band centres is not negligible: |dK L/2| = {:.4} rad",
                centre_phase.abs()
            ));
        }
        Ok(Setup {
            config: config.clone(),
            dsf,
            delta,
            coeffs,
            sigma_p,
            sigma_s,
            sigma_i,
            warnings,
        })
    }

    pub fn pump(&self, chirp: f64) -> Result<PulseSpec, RunError> {
        Ok(PulseSpec::new(self.config.pump.center_nm, self.sigma_p, chirp)?)
    }

    pub fn signal_filter(&self, chirp: f64) -> Result<FilterSpec, RunError> {
        Ok(FilterSpec::new(self.sigma_s, chirp)?)
    }

    pub fn grid(&self, points: usize) -> Result<SpectralGrid, RunError> {
        Ok(match self.config.grid.span_rad_per_ps {
            Some(span) => SpectralGrid::square(span, points)?,
            None => SpectralGrid::for_widths(self.sigma_p, self.sigma_s, points)?,
        })
    }

    pub fn jsa(&self, pump_chirp: f64, points: usize) -> Result<Jsa, RunError> {
        let pump = self.pump(pump_chirp)?;
        let grid = self.grid(points)?;
        Ok(match self.config.model.phase_matching {
            PhaseMatching::Gaussian => build_jsa_gaussian(&pump, &self.coeffs, &grid)?,
            PhaseMatching::Sinc => build_jsa_sinc(&pump, &self.dsf, self.delta, &grid)?,
        })
    }

    /// Pump chirp at the pair source after `length_km` of the configured
    /// standard fiber.
    pub fn chirp_after_smf(&self, length_km: f64) -> f64 {
        let smf = FiberSpec::new("smf", length_km, self.config.smf.beta2_ps2_per_km);
        accumulate_chirp(self.config.pump.initial_chirp, self.sigma_p, &[smf])
    }

    /// Pump chirps for no standard fiber and for each configured length, in
    /// order of increasing length.
    pub fn fig2_chirps(&self) -> Vec<f64> {
        let mut lengths = self.config.smf.lengths_km.clone();
        lengths.push(0.0);
        lengths.sort_by(f64::total_cmp);
        lengths.dedup();
        lengths.into_iter().map(|l| self.chirp_after_smf(l)).collect()
    }

    /// Chirp a signal beam carries after a chain of fiber segments.
    pub fn arm_chirp(&self, arm: &[SegmentSection]) -> f64 {
        let chain: Vec<FiberSpec> = arm
            .iter()
            .map(|s| FiberSpec::new(s.name.clone(), s.length_km, s.beta2_ps2_per_km))
            .collect();
        accumulate_chirp(0.0, self.sigma_s, &chain)
    }

    fn start_report(&self, command: &str) -> RunReport {
        let mut report = RunReport::new(command, self.config.echo());
        report.derive("dsf.beta2", self.dsf.beta2, "ps^2/km");
        report.derive("dsf.beta3", self.dsf.beta3, "ps^3/km");
        report.derive("delta", self.delta, "rad/ps");
        report.derive("phase_matching.A", self.coeffs.idler_bandwidth, "rad/ps");
        report.derive("phase_matching.B", self.coeffs.signal_bandwidth, "rad/ps");
        report.derive(
            "phase_mismatch_centre",
            phase_mismatch(&self.dsf, self.delta, 0.0, 0.0),
            "rad/km",
        );
        report.derive("sigma_p", self.sigma_p, "rad/ps");
        report.derive("sigma_s", self.sigma_s, "rad/ps");
        report.derive("sigma_i", self.sigma_i, "rad/ps");
        for w in &self.warnings {
            report.warn(w.clone());
        }
        report
    }

    fn record_grid(&self, report: &mut RunReport, jsa: &Jsa, filter: &FilterSpec) {
        let (n, _) = jsa.grid.shape();
        report.derive("grid.points", n as f64, "");
        report.derive("grid.span", jsa.grid.idler.span(), "rad/ps");
        let ratio = filtered_edge_ratio(jsa, filter);
        report.derive("grid.filtered_edge_ratio", ratio, "");
        if ratio > TRUNCATION_LIMIT {
            report.warn(format!(
                "filtered amplitude has not decayed at the grid edge ({ratio:.2e} of its peak)"
            ));
        }
    }
}

fn filtered_edge_ratio(jsa: &Jsa, filter: &FilterSpec) -> f64 {
    let m = jsa.filtered(filter);
    let (rows, cols) = m.shape();
    let peak = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut edge: f64 = 0.0;
    for i in 0..rows {
        edge = edge.max(m[(i, 0)].norm()).max(m[(i, cols - 1)].norm());
    }
    for s in 0..cols {
        edge = edge.max(m[(0, s)].norm()).max(m[(rows - 1, s)].norm());
    }
    edge / peak
}

fn sqrt_one_plus_square(c: f64) -> f64 {
    c.hypot(1.0)
}

/// Pump durations along the configured standard-fiber lengths.
pub fn run_chirp(config: &ExperimentConfig) -> Result<RunReport, RunError> {
    let setup = Setup::new(config)?;
    let mut report = setup.start_report("chirp");
    let pump = setup.pump(config.pump.initial_chirp)?;
    report.derive("pump.transform_limited_duration", pump.transform_limited_duration(), "ps");
    let mut table = Table::new(
        "chirp",
        &["length_km", "pump_chirp", "sqrt_1_plus_cp2", "duration_ps", "autocorrelator_ps"],
    )
    .with_plot(Plot {
        title: "Pump broadening in standard fiber".into(),
        x: 0,
        y: vec![3, 4],
        group: None,
        x_label: "SMF length (km)".into(),
        y_label: "duration (ps)".into(),
    });
    let mut lengths = config.smf.lengths_km.clone();
    lengths.push(0.0);
    lengths.sort_by(f64::total_cmp);
    lengths.dedup();
    for length in lengths {
        let chirp = setup.chirp_after_smf(length);
        let duration = pulse_duration(&setup.pump(chirp)?);
        let autocorrelator = autocorrelator_duration(config.pump.center_nm, config.pump.fwhm_nm, chirp)?;
        table.push(vec![
            length.into(),
            chirp.into(),
            sqrt_one_plus_square(chirp).into(),
            duration.into(),
            autocorrelator.into(),
        ]);
    }
    report.tables.push(table);
    Ok(report)
}

/// Pump chirp `√(1 + C_p²)` after each standard-fiber length.
pub fn run_fig2a(config: &ExperimentConfig, smf_lengths_km: &[f64]) -> Result<RunReport, RunError> {
    let setup = Setup::new(config)?;
    let mut report = setup.start_report("fig2a");
    let mut table = Table::new("fig2a", &["length_km", "sqrt_1_plus_cp2"]).with_plot(Plot {
        title: "Pump chirp versus standard fiber length".into(),
        x: 0,
        y: vec![1],
        group: None,
        x_label: "SMF length (km)".into(),
        y_label: "sqrt(1 + Cp^2)".into(),
    });
    for &length in smf_lengths_km {
        table.push(vec![length.into(), sqrt_one_plus_square(setup.chirp_after_smf(length)).into()]);
    }
    report.tables.push(table);
    Ok(report)
}

/// Bunching of the filtered signal beam at each pump chirp, closed form
/// against quadrature.
pub fn run_fig2b(config: &ExperimentConfig, pump_chirps: &[f64], points: usize) -> Result<RunReport, RunError> {
    let setup = Setup::new(config)?;
    let mut report = setup.start_report("fig2b");
    let filter = setup.signal_filter(0.0)?;
    let mut table = Table::new("fig2b", &["sqrt_1_plus_cp2", "g2_closed_form", "g2_numerical"]).with_plot(Plot {
        title: "Signal bunching versus pump chirp".into(),
        x: 0,
        y: vec![1, 2],
        group: None,
        x_label: "sqrt(1 + Cp^2)".into(),
        y_label: "g2".into(),
    });
    for (index, &chirp) in pump_chirps.iter().enumerate() {
        let jsa = setup.jsa(chirp, points)?;
        if index == 0 {
            setup.record_grid(&mut report, &jsa, &filter);
        }
        let closed = g2_closed_form(setup.sigma_s, setup.sigma_p, chirp);
        let numerical = g2_quadrature(&jsa, &filter)?;
        if (closed - numerical).abs() > G2_AGREEMENT * closed {
            report.warn(format!(
                "closed form {closed:.5} and quadrature {numerical:.5} differ by more than 0.5% at Cp = {chirp}"
            ));
        }
        table.push(vec![sqrt_one_plus_square(chirp).into(), closed.into(), numerical.into()]);
    }
    report.tables.push(table);
    Ok(report)
}

/// Bunching and Schmidt data at the configured pump, or across the
/// configured sweep.
pub fn run_g2(config: &ExperimentConfig, points: usize) -> Result<RunReport, RunError> {
    let (variable, values) = match &config.sweep {
        Some(sweep) => (Some(sweep.variable), sweep.values.clone()),
        None => (None, vec![config.pump.initial_chirp]),
    };
    let key = variable.map_or("pump.initial_chirp", SweepVariable::key);
    let base = Setup::new(config)?;
    let mut report = base.start_report("g2");
    let mut table = Table::new(
        "g2",
        &[key, "pump_chirp", "g2_closed_form", "g2_numerical", "g2_schmidt", "schmidt_number"],
    )
    .with_plot(Plot {
        title: format!("Signal bunching versus {key}"),
        x: 0,
        y: vec![2, 3, 4],
        group: None,
        x_label: key.to_string(),
        y_label: "g2".into(),
    });
    for (index, value) in values.into_iter().enumerate() {
        let point = match variable {
            Some(v) => config.with_sweep_value(v, value),
            None => config.clone(),
        };
        let setup = Setup::new(&point)?;
        for w in &setup.warnings {
            report.warn(w.clone());
        }
        let chirp = match variable {
            Some(SweepVariable::SmfLength) => setup.chirp_after_smf(value),
            _ => point.pump.initial_chirp,
        };
        let filter = setup.signal_filter(0.0)?;
        let jsa = setup.jsa(chirp, points)?;
        if index == 0 {
            setup.record_grid(&mut report, &jsa, &filter);
        }
        let numerical = g2_numerical(&jsa, &filter)?;
        let schmidt = schmidt_decompose(&jsa, &filter)?;
        table.push(vec![
            value.into(),
            chirp.into(),
            g2_closed_form(setup.sigma_s, setup.sigma_p, chirp).into(),
            numerical.g2.into(),
            schmidt.g2.into(),
            schmidt.schmidt_number.into(),
        ]);
    }
    report.tables.push(table);
    Ok(report)
}

/// One interferometer configuration of the interference runs.
#[derive(Debug, Clone)]
pub struct HomCase {
    pub label: String,
    pub chirp1: f64,
    pub chirp2: f64,
    pub analytic: HomResult,
    /// Empty for analytic-only scans.
    pub numerical: Vec<(f64, f64)>,
    /// Mode matching seen by the quadrature.
    pub oracle_mode_matching: Option<f64>,
    /// Largest relative gap between the two curves.
    pub max_deviation: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct HomRun {
    pub g2: f64,
    pub pump_duration_ps: f64,
    pub cases: Vec<HomCase>,
}

fn hom_cases(setup: &Setup, points: Option<usize>) -> Result<HomRun, RunError> {
    let hom = &setup.config.hom;
    let pump = setup.pump(hom.pump_chirp)?;
    let pump_duration_ps = pulse_duration(&pump);
    let g2 = hom
        .g2
        .unwrap_or_else(|| g2_closed_form(setup.sigma_s, setup.sigma_p, hom.pump_chirp));
    let scan = DelayScan::new(hom.delay_span_ps, hom.delay_step_ps)?;
    let jsa = points.map(|n| setup.jsa(hom.pump_chirp, n)).transpose()?;
    let mut cases = Vec::new();
    for case in &hom.cases {
        let (chirp1, chirp2) = (setup.arm_chirp(&case.arm1), setup.arm_chirp(&case.arm2));
        let (f1, f2) = (setup.signal_filter(chirp1)?, setup.signal_filter(chirp2)?);
        let config = HomConfig {
            filter1: f1,
            filter2: f2,
            pump_duration_ps,
            g2,
            eta: hom.eta,
            reflectivity: hom.reflectivity,
            scan,
        };
        let analytic = coincidence_curve(&config)?;
        let (numerical, oracle_mode_matching, max_deviation) = match &jsa {
            Some(jsa) => {
                let oracle = HomOracle::new(jsa, jsa, &f1, &f2)?;
                let curve = oracle.curve(&scan, hom.eta, hom.reflectivity);
                let deviation = analytic
                    .curve
                    .iter()
                    .zip(&curve)
                    .map(|(a, n)| ((a.1 - n.1) / a.1).abs())
                    .fold(0.0, f64::max);
                (curve, Some(oracle.mode_matching()), Some(deviation))
            }
            None => (Vec::new(), None, None),
        };
        cases.push(HomCase {
            label: case.label.clone(),
            chirp1,
            chirp2,
            analytic,
            numerical,
            oracle_mode_matching,
            max_deviation,
        });
    }
    Ok(HomRun {
        g2,
        pump_duration_ps,
        cases,
    })
}

/// All configured interference cases, analytic and by quadrature on a
/// `points²` grid.
pub fn fig4_cases(config: &ExperimentConfig, points: usize) -> Result<HomRun, RunError> {
    hom_cases(&Setup::new(config)?, Some(points))
}

fn curve_table(name: &str, title: &str, cases: &[HomCase], pick: impl Fn(&HomCase) -> &[(f64, f64)]) -> Table {
    let mut table = Table::new(name, &["delta_tau_ps", "normalized_coincidence", "case_label"]).with_plot(Plot {
        title: title.into(),
        x: 0,
        y: vec![1],
        group: Some(2),
        x_label: "delay (ps)".into(),
        y_label: "N12/(N1 N2)".into(),
    });
    for case in cases {
        for &(dt, value) in pick(case) {
            table.push(vec![dt.into(), value.into(), Cell::Text(case.label.clone())]);
        }
    }
    table
}

fn summary_table(name: &str, cases: &[HomCase]) -> Table {
    let mut table = Table::new(
        name,
        &[
            "case_label",
            "chirp_arm1",
            "chirp_arm2",
            "mode_matching",
            "visibility",
            "fwhm_ps",
            "asymptote",
            "minimum",
            "oracle_mode_matching",
            "max_relative_deviation",
        ],
    );
    for case in cases {
        let a = &case.analytic;
        table.push(vec![
            Cell::Text(case.label.clone()),
            case.chirp1.into(),
            case.chirp2.into(),
            a.mode_matching.into(),
            a.visibility.into(),
            a.fwhm_ps.into(),
            a.asymptote.into(),
            a.minimum.into(),
            case.oracle_mode_matching.unwrap_or(f64::NAN).into(),
            case.max_deviation.unwrap_or(f64::NAN).into(),
        ]);
    }
    table
}

fn hom_report(setup: &Setup, command: &str, run: &HomRun) -> RunReport {
    let mut report = setup.start_report(command);
    report.derive("hom.g2", run.g2, "");
    report.derive("hom.pump_duration", run.pump_duration_ps, "ps");
    report.derive("hom.coherence_time", 1.0 / setup.sigma_s, "ps");
    if setup.config.hom.cases.is_empty() {
        report.warn("no [[hom.case]] entries configured");
    }
    report
}

/// Interference curves for every configured case, analytic (`fig4.csv`) and
/// by quadrature (`fig4_numerical.csv`), plus a per-case summary.
pub fn run_fig4(config: &ExperimentConfig, points: usize) -> Result<RunReport, RunError> {
    let setup = Setup::new(config)?;
    let run = hom_cases(&setup, Some(points))?;
    let mut report = hom_report(&setup, "fig4", &run);
    let jsa = setup.jsa(config.hom.pump_chirp, points)?;
    setup.record_grid(&mut report, &jsa, &setup.signal_filter(0.0)?);
    for case in &run.cases {
        if let Some(deviation) = case.max_deviation {
            if deviation > HOM_AGREEMENT {
                report.warn(format!(
                    "case {}: quadrature departs from the analytic curve by {:.2}%",
                    case.label,
                    100.0 * deviation
                ));
            }
        }
    }
    report.tables.push(curve_table("fig4", "Two-source interference", &run.cases, |c| &c.analytic.curve));
    report.tables.push(curve_table(
        "fig4_numerical",
        "Two-source interference, quadrature",
        &run.cases,
        |c| &c.numerical,
    ));
    report.tables.push(summary_table("fig4_summary", &run.cases));
    Ok(report)
}

/// Analytic interference curves only; fast enough for what-if runs with an
/// overridden `hom.g2`.
pub fn run_hom_scan(config: &ExperimentConfig) -> Result<RunReport, RunError> {
    let setup = Setup::new(config)?;
    let run = hom_cases(&setup, None)?;
    let mut report = hom_report(&setup, "hom-scan", &run);
    report.tables.push(curve_table("hom_scan", "Two-source interference", &run.cases, |c| &c.analytic.curve));
    report.tables.push(summary_table("hom_scan_summary", &run.cases));
    Ok(report)
}

/// The JSA at the configured pump, for `jsa.txt`.
pub fn run_jsa_dump(config: &ExperimentConfig, points: usize) -> Result<RunReport, RunError> {
    let setup = Setup::new(config)?;
    let mut report = setup.start_report("jsa-dump");
    let jsa = setup.jsa(config.pump.initial_chirp, points)?;
    setup.record_grid(&mut report, &jsa, &setup.signal_filter(0.0)?);
    report.derive("jsa.max_modulus", jsa.max_modulus(), "");
    report.jsa = Some(jsa);
    Ok(report)
}
