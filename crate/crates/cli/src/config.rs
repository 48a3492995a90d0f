//! Scenario configuration: TOML text plus `key=value` overrides.

use std::path::PathBuf;

use lvfront::{CoefficientSet, FrontOptions, PeriodicFn};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub coefficients: CoefficientsConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    #[serde(default)]
    pub ratio: RatioConfig,
    #[serde(default)]
    pub entire: EntireConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
}

/// A coefficient is either a constant or `{ mean, harmonics = [[k, cos, sin], ...] }`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum CoefficientSpec {
    Constant(f64),
    Fourier(FourierSpec),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierSpec {
    pub mean: f64,
    #[serde(default)]
    pub harmonics: Vec<(u32, f64, f64)>,
}

impl CoefficientSpec {
    fn to_fn(&self) -> PeriodicFn {
        match self {
            CoefficientSpec::Constant(v) => PeriodicFn::constant(*v),
            CoefficientSpec::Fourier(f) => PeriodicFn::new(f.mean, f.harmonics.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsConfig {
    #[serde(rename = "T")]
    pub period: f64,
    pub d: f64,
    pub r1: CoefficientSpec,
    pub r2: CoefficientSpec,
    pub a1: CoefficientSpec,
    pub a2: CoefficientSpec,
    pub b1: CoefficientSpec,
    pub b2: CoefficientSpec,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "L")]
    pub l: f64,
    pub h: f64,
    pub dt: f64,
    #[serde(default = "defaults::warmup_periods")]
    pub warmup_periods: usize,
    /// Orbit samples per period.
    #[serde(rename = "M", default = "defaults::orbit_samples")]
    pub m: usize,
    #[serde(default = "defaults::max_periods")]
    pub max_periods: usize,
    #[serde(default = "defaults::store_samples")]
    pub store_samples: usize,
    /// Stored front phases written to `front.csv`.
    #[serde(default = "defaults::csv_phases")]
    pub csv_phases: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub check: bool,
    pub orbits: bool,
    pub front: bool,
    pub spectral: bool,
    pub decay: bool,
    pub entire: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            check: true,
            orbits: true,
            front: true,
            spectral: true,
            decay: true,
            entire: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatioConfig {
    /// `[j1, j2]` pairs with `j2 ≤ j1 ≤ 0`.
    pub shifts: Vec<[f64; 2]>,
    pub x_max: f64,
}

impl Default for RatioConfig {
    fn default() -> Self {
        RatioConfig {
            shifts: vec![[0.0, -3.0], [-2.0, -5.0], [-4.0, -4.0], [-1.0, -8.0]],
            x_max: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntireConfig {
    /// Defaults to `ϖ - 1`, or -10 when the front moves right.
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub n_list: Vec<usize>,
    /// Defaults to `4T`.
    pub t_end: Option<f64>,
    pub samples_per_period: usize,
    pub envelope_periods: usize,
    pub envelope_x_max: f64,
    /// Snapshot times; default `-2T, -T, 0, t_end`.
    pub snapshot_times: Option<Vec<f64>>,
}

impl Default for EntireConfig {
    fn default() -> Self {
        EntireConfig {
            omega1: None,
            omega2: None,
            n_list: vec![2, 4, 6, 8],
            t_end: None,
            samples_per_period: 4,
            envelope_periods: 5,
            envelope_x_max: 40.0,
            snapshot_times: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub front: f64,
    pub front_residual: f64,
    pub orbit_residual: f64,
    pub decay_rel: f64,
    pub epsilon_fraction: f64,
    /// `tol_env = envelope_factor × front residual`.
    pub envelope_factor: f64,
    pub entire: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            front: 1e-9,
            front_residual: 5e-4,
            orbit_residual: 1e-6,
            decay_rel: 0.05,
            epsilon_fraction: 0.1,
            envelope_factor: 2.0,
            entire: 5e-4,
        }
    }
}

mod defaults {
    pub fn warmup_periods() -> usize {
        60
    }
    pub fn orbit_samples() -> usize {
        256
    }
    pub fn max_periods() -> usize {
        400
    }
    pub fn store_samples() -> usize {
        200
    }
    pub fn csv_phases() -> usize {
        8
    }
}

impl ScenarioConfig {
    pub fn coefficient_set(&self) -> Result<CoefficientSet, CliError> {
        let c = &self.coefficients;
        CoefficientSet::new(
            c.period,
            c.d,
            c.r1.to_fn(),
            c.r2.to_fn(),
            c.a1.to_fn(),
            c.a2.to_fn(),
            c.b1.to_fn(),
            c.b2.to_fn(),
        )
        .map_err(|e| CliError::Config(format!("coefficients: {e}")))
    }

    pub fn front_options(&self) -> FrontOptions {
        let g = &self.grid;
        FrontOptions {
            l: g.l,
            h: g.h,
            dt: g.dt,
            warmup_periods: g.warmup_periods,
            max_periods: g.max_periods,
            tol_front: self.tolerances.front,
            store_samples: g.store_samples,
            ..FrontOptions::default()
        }
    }

    /// Identifies the inputs a front checkpoint depends on.
    pub fn front_key(&self) -> String {
        format!("{:?}|{:?}|{:?}", self.coefficients, self.grid, self.tolerances.front)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, v: f64| CliError::Config(format!("{field} must be positive, got {v}"));
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.front", t.front),
            ("tolerances.front_residual", t.front_residual),
            ("tolerances.orbit_residual", t.orbit_residual),
            ("tolerances.decay_rel", t.decay_rel),
            ("tolerances.epsilon_fraction", t.epsilon_fraction),
            ("tolerances.envelope_factor", t.envelope_factor),
            ("tolerances.entire", t.entire),
            ("grid.L", self.grid.l),
            ("grid.h", self.grid.h),
            ("grid.dt", self.grid.dt),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(name, v));
            }
        }
        let e = &self.entire;
        if e.n_list.is_empty() || e.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config(
                "entire.n_list must be non-empty and strictly increasing".into(),
            ));
        }
        if e.samples_per_period == 0 || self.grid.csv_phases == 0 {
            return Err(CliError::Config(
                "entire.samples_per_period and grid.csv_phases must be positive".into(),
            ));
        }
        if let Some([j1, j2]) = self.ratio.shifts.iter().find(|[j1, j2]| !(j2 <= j1 && *j1 <= 0.0)) {
            return Err(CliError::Config(format!(
                "ratio.shifts entry [{j1}, {j2}] needs j2 <= j1 <= 0"
            )));
        }
        let p = &self.pipeline;
        let chain = [
            ("orbits", p.orbits, "check", p.check),
            ("front", p.front, "orbits", p.orbits),
            ("spectral", p.spectral, "front", p.front),
            ("decay", p.decay, "spectral", p.spectral),
            ("entire", p.entire, "decay", p.decay),
        ];
        for (stage, on, needs, needs_on) in chain {
            if on && !needs_on {
                return Err(CliError::Config(format!("pipeline.{stage} requires pipeline.{needs}")));
            }
        }
        Ok(())
    }
}

/// Parses `text`, applies `key=value` overrides (dotted keys, TOML values,
/// bare words taken as strings) and validates.
pub fn load_config(text: &str, overrides: &[String]) -> Result<ScenarioConfig, CliError> {
    let parsed: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let cfg = if overrides.is_empty() {
        parsed
    } else {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(format!("after overrides: {e}")))?
    };
    cfg.validate()?;
    Ok(cfg)
}

fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not key=value")))?;
    let (key, raw) = (key.trim(), raw.trim());
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("override key `{key}` is malformed")));
    }
    let mut node = table;
    for part in &parts[..parts.len() - 1] {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override key `{key}`: `{part}` is not a table")))?;
    }
    node.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const PS_A: &str = r#"
[coefficients]
T = 1.0
d = 1.0
r1 = 1.0
r2 = 1.0
a1 = 1.0
a2 = 1.8
b1 = 1.3
b2 = 1.0

[grid]
L = 60.0
h = 0.05
dt = 1e-3
"#;

    #[test]
    fn parses_defaults() {
        let c = load_config(PS_A, &[]).unwrap();
        assert_eq!(c.grid.m, 256);
        assert_eq!(c.entire.n_list, vec![2, 4, 6, 8]);
        assert!(c.pipeline.entire);
        assert_eq!(c.coefficient_set().unwrap(), CoefficientSet::ps_a());
    }

    #[test]
    fn fourier_coefficients() {
        let text = PS_A.replace("r1 = 1.0", "r1 = { mean = 1.0, harmonics = [[1, 0.0, 0.3]] }");
        let c = load_config(&text, &[]).unwrap();
        assert_eq!(c.coefficient_set().unwrap(), CoefficientSet::ps_b());
    }

    #[test]
    fn missing_field_is_named_with_line() {
        let text = PS_A.replace("h = 0.05\n", "");
        let err = load_config(&text, &[]).unwrap_err().to_string();
        assert!(err.contains("missing field `h`"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn unknown_field_rejected() {
        let text = PS_A.replace("h = 0.05", "h = 0.05\nhh = 1");
        assert!(load_config(&text, &[]).unwrap_err().to_string().contains("hh"));
    }

    #[test]
    fn overrides() {
        let c = load_config(
            PS_A,
            &[
                "grid.h=0.025".into(),
                "coefficients.b1=0.9".into(),
                "output=runs/x".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.grid.h, 0.025);
        assert_eq!(c.coefficients.b1, CoefficientSpec::Constant(0.9));
        assert_eq!(c.output, Some(PathBuf::from("runs/x")));
        let c = load_config(PS_A, &["entire.n_list=[1, 3]".into()]).unwrap();
        assert_eq!(c.entire.n_list, vec![1, 3]);
        assert!(matches!(
            load_config(PS_A, &["grid.h".into()]),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            load_config(PS_A, &["grid.h=abc".into()]),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            load_config(PS_A, &["grid.L.x=1".into()]),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn invariants() {
        let e = load_config(PS_A, &["pipeline.decay=false".into()])
            .unwrap_err()
            .to_string();
        assert!(e.contains("pipeline.entire requires pipeline.decay"), "{e}");
        assert!(load_config(PS_A, &["tolerances.entire=0".into()]).is_err());
        assert!(load_config(PS_A, &["entire.n_list=[4, 2]".into()]).is_err());
        assert!(load_config(PS_A, &["ratio.shifts=[[1.0, 0.0]]".into()]).is_err());
        let ok = ["pipeline.entire=false", "pipeline.decay=false"].map(String::from);
        assert!(load_config(PS_A, &ok).is_ok());
    }

    #[test]
    fn front_key_tracks_inputs() {
        let a = load_config(PS_A, &[]).unwrap();
        let b = load_config(PS_A, &["grid.dt=5e-4".into()]).unwrap();
        let c = load_config(PS_A, &["entire.n_list=[2]".into()]).unwrap();
        assert_ne!(a.front_key(), b.front_key());
        assert_eq!(a.front_key(), c.front_key());
    }
}
