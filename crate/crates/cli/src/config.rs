//! Experiment configuration: sectioned TOML with the unit in every key name.
//!
//! Sections `pump`, `dsf`, `signal_filter` and `idler_filter` are required;
//! `smf`, `grid`, `model`, `hom` and `sweep` fall back to defaults. Every
//! error carries the offending `section.key` and, where the source has one,
//! its line.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Preset with the pair-source, filter and interferometer parameters of the
/// reference experiment.
pub const REFERENCE_PRESET: &str = include_str!("../presets/reference.toml");

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub center_nm: f64,
    pub fwhm_nm: f64,
    /// Chirp the laser already carries before any fiber.
    #[serde(default)]
    pub initial_chirp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DsfSection {
    pub length_km: f64,
    pub zero_dispersion_nm: f64,
    pub dispersion_slope_ps_per_nm2_km: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_per_w_km: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_power_w: Option<f64>,
    /// The pair source is meant to be pumped on the anomalous side.
    #[serde(default = "yes")]
    pub anomalous: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmfSection {
    pub beta2_ps2_per_km: f64,
    /// Lengths inserted before the pair source, one run each.
    #[serde(default)]
    pub lengths_km: Vec<f64>,
}

impl Default for SmfSection {
    fn default() -> Self {
        SmfSection {
            beta2_ps2_per_km: -20.0,
            lengths_km: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    pub center_nm: f64,
    pub fwhm_nm: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Half-width of both detuning axes; derived from the pump and filter
    /// widths when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span_rad_per_ps: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseMatching {
    #[default]
    Gaussian,
    Sinc,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default)]
    pub phase_matching: PhaseMatching,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSection {
    pub name: String,
    pub length_km: f64,
    pub beta2_ps2_per_km: f64,
}

/// Transmission chains of the two interfering signal beams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSection {
    pub label: String,
    #[serde(default)]
    pub arm1: Vec<SegmentSection>,
    #[serde(default)]
    pub arm2: Vec<SegmentSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomSection {
    /// Pump chirp at the pair sources during the interference runs.
    #[serde(default)]
    pub pump_chirp: f64,
    /// Overrides the bunching computed from the pump and filter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2: Option<f64>,
    #[serde(default = "unit")]
    pub eta: f64,
    #[serde(default = "half")]
    pub reflectivity: f64,
    #[serde(default = "default_delay_span")]
    pub delay_span_ps: f64,
    #[serde(default = "default_delay_step")]
    pub delay_step_ps: f64,
    #[serde(default, rename = "case")]
    pub cases: Vec<CaseSection>,
}

fn unit() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

fn default_delay_span() -> f64 {
    40.0
}

fn default_delay_step() -> f64 {
    0.5
}

impl Default for HomSection {
    fn default() -> Self {
        HomSection {
            pump_chirp: 0.0,
            g2: None,
            eta: unit(),
            reflectivity: half(),
            delay_span_ps: default_delay_span(),
            delay_step_ps: default_delay_step(),
            cases: Vec::new(),
        }
    }
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "pump.initial_chirp")]
    PumpChirp,
    #[serde(rename = "pump.fwhm_nm")]
    PumpFwhm,
    #[serde(rename = "signal_filter.fwhm_nm")]
    FilterFwhm,
    #[serde(rename = "smf.length_km")]
    SmfLength,
    #[serde(rename = "dsf.length_km")]
    DsfLength,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 5] = [
        SweepVariable::PumpChirp,
        SweepVariable::PumpFwhm,
        SweepVariable::FilterFwhm,
        SweepVariable::SmfLength,
        SweepVariable::DsfLength,
    ];

    pub fn key(self) -> &'static str {
        match self {
            SweepVariable::PumpChirp => "pump.initial_chirp",
            SweepVariable::PumpFwhm => "pump.fwhm_nm",
            SweepVariable::FilterFwhm => "signal_filter.fwhm_nm",
            SweepVariable::SmfLength => "smf.length_km",
            SweepVariable::DsfLength => "dsf.length_km",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub pump: PumpSection,
    pub dsf: DsfSection,
    pub smf: SmfSection,
    pub signal_filter: FilterSection,
    pub idler_filter: FilterSection,
    pub grid: GridSection,
    pub model: ModelSection,
    pub hom: HomSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    /// Load-time notes that do not stop a run.
    #[serde(skip)]
    pub warnings: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    pump: Option<PumpSection>,
    dsf: Option<DsfSection>,
    #[serde(default)]
    smf: SmfSection,
    signal_filter: Option<FilterSection>,
    idler_filter: Option<FilterSection>,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    model: ModelSection,
    #[serde(default)]
    hom: HomSection,
    sweep: Option<SweepSection>,
}

impl ExperimentConfig {
    pub fn reference() -> Self {
        parse_config(REFERENCE_PRESET).expect("bundled preset is valid")
    }

    /// The configuration as TOML, for the run report.
    pub fn echo(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    /// Replaces the swept parameter with `value`.
    pub fn with_sweep_value(&self, variable: SweepVariable, value: f64) -> Self {
        let mut config = self.clone();
        match variable {
            SweepVariable::PumpChirp => config.pump.initial_chirp = value,
            SweepVariable::PumpFwhm => config.pump.fwhm_nm = value,
            SweepVariable::FilterFwhm => config.signal_filter.fwhm_nm = value,
            SweepVariable::SmfLength => config.smf.lengths_km = vec![value],
            SweepVariable::DsfLength => config.dsf.length_km = value,
        }
        config
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let source = std::fs::read_to_string(path).map_err(|e| ConfigError {
        line: None,
        field: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&source)
}

pub fn parse_config(source: &str) -> Result<ExperimentConfig, ConfigError> {
    let document: Document = toml::from_str(source).map_err(|e| parse_error(source, &e))?;
    let missing: Vec<&str> = [
        ("pump", document.pump.is_none()),
        ("dsf", document.dsf.is_none()),
        ("signal_filter", document.signal_filter.is_none()),
        ("idler_filter", document.idler_filter.is_none()),
    ]
    .into_iter()
    .filter_map(|(name, absent)| absent.then_some(name))
    .collect();
    if !missing.is_empty() {
        return Err(ConfigError {
            line: None,
            field: missing.join(", "),
            message: format!("missing required section(s) [{}]", missing.join("], [")),
        });
    }
    let mut config = ExperimentConfig {
        pump: document.pump.unwrap(),
        dsf: document.dsf.unwrap(),
        smf: document.smf,
        signal_filter: document.signal_filter.unwrap(),
        idler_filter: document.idler_filter.unwrap(),
        grid: document.grid,
        model: document.model,
        hom: document.hom,
        sweep: document.sweep,
        warnings: Vec::new(),
    };
    Validator { source }.run(&mut config)?;
    Ok(config)
}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

/// `section.key` for the assignment on `line`, from the nearest header above.
fn field_at_line(source: &str, line: usize) -> Option<String> {
    let lines: Vec<&str> = source.lines().collect();
    let text = lines.get(line.checked_sub(1)?)?.trim();
    let key = text.split('=').next().map(str::trim).filter(|k| !k.is_empty() && !k.starts_with('['));
    let section = lines[..line - 1]
        .iter()
        .rev()
        .map(|l| l.trim())
        .find(|l| l.starts_with('['))
        .map(|l| l.trim_matches(|c| c == '[' || c == ']').trim().to_string());
    match (section, key) {
        (Some(section), Some(key)) => Some(format!("{section}.{key}")),
        (None, Some(key)) => Some(key.to_string()),
        (Some(section), None) => Some(section),
        (None, None) => None,
    }
}

fn parse_error(source: &str, error: &toml::de::Error) -> ConfigError {
    let line = error.span().map(|span| line_of(source, span.start));
    let field = line
        .and_then(|line| field_at_line(source, line))
        .unwrap_or_else(|| "document".to_string());
    ConfigError {
        line,
        field,
        message: error.message().trim().to_string(),
    }
}

struct Validator<'a> {
    source: &'a str,
}

impl Validator<'_> {
    /// Line of `key` inside the `occurrence`-th `[section]` (or
    /// `[[section]]`) header.
    fn locate(&self, section: &str, occurrence: usize, key: &str) -> Option<usize> {
        let mut seen = 0;
        let mut inside = false;
        for (index, raw) in self.source.lines().enumerate() {
            let text = raw.trim();
            if text.starts_with('[') {
                let name = text.trim_matches(|c| c == '[' || c == ']').trim();
                inside = name == section && {
                    seen += 1;
                    seen == occurrence + 1
                };
                continue;
            }
            if inside && text.split('=').next().map(str::trim) == Some(key) {
                return Some(index + 1);
            }
        }
        None
    }

    fn fail(&self, section: &str, occurrence: usize, key: &str, message: String) -> ConfigError {
        ConfigError {
            line: self.locate(section, occurrence, key),
            field: format!("{section}.{key}"),
            message,
        }
    }

    fn check(&self, section: &str, key: &str, ok: bool, message: impl FnOnce() -> String) -> Result<(), ConfigError> {
        self.check_in(section, 0, key, ok, message)
    }

    fn check_in(
        &self,
        section: &str,
        occurrence: usize,
        key: &str,
        ok: bool,
        message: impl FnOnce() -> String,
    ) -> Result<(), ConfigError> {
        if ok {
            Ok(())
        } else {
            Err(self.fail(section, occurrence, key, message()))
        }
    }

    fn positive(&self, section: &str, key: &str, value: f64) -> Result<(), ConfigError> {
        self.check(section, key, value.is_finite() && value > 0.0, || {
            format!("must be positive, got {value}")
        })
    }

    fn non_negative(&self, section: &str, key: &str, value: f64) -> Result<(), ConfigError> {
        self.check(section, key, value.is_finite() && value >= 0.0, || {
            format!("must be non-negative, got {value}")
        })
    }

    fn finite(&self, section: &str, key: &str, value: f64) -> Result<(), ConfigError> {
        self.check(section, key, value.is_finite(), || format!("must be finite, got {value}"))
    }

    fn run(&self, config: &mut ExperimentConfig) -> Result<(), ConfigError> {
        let pump = &config.pump;
        self.positive("pump", "center_nm", pump.center_nm)?;
        self.positive("pump", "fwhm_nm", pump.fwhm_nm)?;
        self.check("pump", "fwhm_nm", pump.fwhm_nm < pump.center_nm, || {
            "bandwidth must be smaller than the centre wavelength".into()
        })?;
        self.finite("pump", "initial_chirp", pump.initial_chirp)?;

        let dsf = &config.dsf;
        self.positive("dsf", "length_km", dsf.length_km)?;
        self.positive("dsf", "zero_dispersion_nm", dsf.zero_dispersion_nm)?;
        self.finite("dsf", "dispersion_slope_ps_per_nm2_km", dsf.dispersion_slope_ps_per_nm2_km)?;
        self.check(
            "dsf",
            "dispersion_slope_ps_per_nm2_km",
            dsf.dispersion_slope_ps_per_nm2_km != 0.0,
            || "a zero slope leaves no dispersion to phase match with".into(),
        )?;
        if let Some(gamma) = dsf.gamma_per_w_km {
            self.non_negative("dsf", "gamma_per_w_km", gamma)?;
        }
        if let Some(power) = dsf.peak_power_w {
            self.non_negative("dsf", "peak_power_w", power)?;
        }
        self.check(
            "dsf",
            "peak_power_w",
            dsf.gamma_per_w_km.is_some() == dsf.peak_power_w.is_some(),
            || "gamma_per_w_km and peak_power_w must be given together".into(),
        )?;

        self.finite("smf", "beta2_ps2_per_km", config.smf.beta2_ps2_per_km)?;
        for &length in &config.smf.lengths_km {
            self.non_negative("smf", "lengths_km", length)?;
        }

        for (name, filter) in [("signal_filter", &config.signal_filter), ("idler_filter", &config.idler_filter)] {
            self.positive(name, "center_nm", filter.center_nm)?;
            self.positive(name, "fwhm_nm", filter.fwhm_nm)?;
        }
        self.check(
            "idler_filter",
            "center_nm",
            config.idler_filter.center_nm != config.signal_filter.center_nm,
            || "signal and idler must be non-degenerate".into(),
        )?;

        if let Some(points) = config.grid.points {
            self.check("grid", "points", points >= 16, || format!("need at least 16 points, got {points}"))?;
        }
        if let Some(span) = config.grid.span_rad_per_ps {
            self.positive("grid", "span_rad_per_ps", span)?;
        }

        let hom = &config.hom;
        self.finite("hom", "pump_chirp", hom.pump_chirp)?;
        if let Some(g2) = hom.g2 {
            self.check("hom", "g2", (1.0..=2.0).contains(&g2), || {
                format!("thermal bunching lies in [1, 2], got {g2}")
            })?;
        }
        self.non_negative("hom", "eta", hom.eta)?;
        self.check("hom", "reflectivity", (0.0..=1.0).contains(&hom.reflectivity), || {
            format!("must lie in [0, 1], got {}", hom.reflectivity)
        })?;
        self.positive("hom", "delay_span_ps", hom.delay_span_ps)?;
        self.positive("hom", "delay_step_ps", hom.delay_step_ps)?;
        for (index, case) in hom.cases.iter().enumerate() {
            self.check_in("hom.case", index, "label", !case.label.trim().is_empty(), || {
                "case label must not be empty".into()
            })?;
            for segment in case.arm1.iter().chain(&case.arm2) {
                self.check_in(
                    "hom.case",
                    index,
                    if case.arm1.contains(segment) { "arm1" } else { "arm2" },
                    segment.length_km.is_finite()
                        && segment.length_km >= 0.0
                        && segment.beta2_ps2_per_km.is_finite(),
                    || format!("segment '{}' needs a finite non-negative length and finite beta2", segment.name),
                )?;
            }
        }

        if let Some(sweep) = &config.sweep {
            self.check("sweep", "values", !sweep.values.is_empty(), || "no sweep values".into())?;
            for &value in &sweep.values {
                self.finite("sweep", "values", value)?;
                let ok = match sweep.variable {
                    SweepVariable::PumpChirp => true,
                    SweepVariable::SmfLength => value >= 0.0,
                    _ => value > 0.0,
                };
                self.check("sweep", "values", ok, || {
                    format!("{value} is outside the domain of {}", sweep.variable.key())
                })?;
            }
        }

        let (pump_nm, zero_nm) = (config.pump.center_nm, config.dsf.zero_dispersion_nm);
        let slope = config.dsf.dispersion_slope_ps_per_nm2_km;
        if config.dsf.anomalous && (pump_nm - zero_nm) * slope <= 0.0 {
            config.warnings.push(format!(
                "dsf: pump at {pump_nm} nm is not on the anomalous side of the zero-dispersion wavelength {zero_nm} nm (beta2 >= 0)"
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_loads() {
        let config = ExperimentConfig::reference();
        assert_eq!(config.pump.center_nm, 1538.9);
        assert_eq!(config.hom.cases.len(), 3);
        assert!(config.warnings.is_empty());
    }

    #[test]
    fn empty_file_lists_required_sections() {
        let error = parse_config("").unwrap_err();
        for name in ["pump", "dsf", "signal_filter", "idler_filter"] {
            assert!(error.field.contains(name), "{error}");
        }
    }

    #[test]
    fn type_errors_carry_line_and_field() {
        let source = REFERENCE_PRESET.replacen("fwhm_nm = 1.0", "fwhm_nm = \"wide\"", 1);
        let error = parse_config(&source).unwrap_err();
        let expected = source.lines().position(|l| l.contains("\"wide\"")).unwrap() + 1;
        assert_eq!(error.line, Some(expected));
        assert_eq!(error.field, "pump.fwhm_nm");
    }

    #[test]
    fn domain_errors_carry_line_and_field() {
        let source = REFERENCE_PRESET.replacen("reflectivity = 0.5", "reflectivity = 1.5", 1);
        let error = parse_config(&source).unwrap_err();
        let expected = source.lines().position(|l| l.contains("reflectivity = 1.5")).unwrap() + 1;
        assert_eq!(error.line, Some(expected));
        assert_eq!(error.field, "hom.reflectivity");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let source = REFERENCE_PRESET.replacen("[pump]", "[pump]\nwidth_nm = 3.0", 1);
        let error = parse_config(&source).unwrap_err();
        assert_eq!(error.field, "pump.width_nm");
        assert!(error.message.contains("width_nm"));
    }

    #[test]
    fn unknown_sweep_variable_is_rejected() {
        let source = format!("{REFERENCE_PRESET}\n[sweep]\nvariable = \"pump.colour\"\nvalues = [1.0]\n");
        let error = parse_config(&source).unwrap_err();
        assert_eq!(error.field, "sweep.variable");
    }

    #[test]
    fn normal_dispersion_pump_warns() {
        let source = REFERENCE_PRESET.replacen("center_nm = 1538.9", "center_nm = 1537.5", 1);
        let config = parse_config(&source).unwrap();
        assert_eq!(config.warnings.len(), 1);
        assert!(config.warnings[0].contains("anomalous"));
    }

    #[test]
    fn echo_round_trips() {
        let config = ExperimentConfig::reference();
        assert_eq!(parse_config(&config.echo()).unwrap(), config);
    }
}
