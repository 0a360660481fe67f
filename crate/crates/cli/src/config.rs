//! Run configuration: TOML with strict key checking, dotted-path overrides,
//! and resolution into the core types.

use std::fmt;

use phasetip_core::basin::BaseSide;
use phasetip_core::cycles::CycleSearchCfg;
use phasetip_core::forcing::{InputShift, ParameterPath, ShiftKind, SlavedParam};
use phasetip_core::integrate::IntegratorConfig;
use phasetip_core::models::{GlyParams, ModelParams, ParamKey, State, VdpParams};
use serde::{Deserialize, Serialize};

/// A configuration problem: exit code 1 territory.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub model: String,
    #[serde(default = "default_out_dir")]
    pub out_dir: String,
    #[serde(default)]
    pub seed: u64,
}

fn default_out_dir() -> String {
    "out".into()
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub mu: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub d: Option<f64>,
    pub v: Option<f64>,
    pub sigma_i: Option<f64>,
    pub k_half: Option<f64>,
    pub l: Option<f64>,
    pub sigma_m: Option<f64>,
    pub n: Option<u32>,
    pub q: Option<f64>,
    pub k_s: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesSection {
    pub rel: Option<f64>,
    pub abs: Option<f64>,
    pub max_step: Option<f64>,
    pub max_time: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleSearchSection {
    pub return_tol: Option<f64>,
    pub max_returns: Option<usize>,
    pub samples: Option<usize>,
    pub first_return_budget: Option<f64>,
    pub escape_radius: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlavedSection {
    pub param: String,
    pub c0: f64,
    pub c1: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSection {
    pub param: String,
    pub b_max: Option<f64>,
    pub slaved: Option<SlavedSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSection {
    /// "outer" for the large cycle, "inner" for the small one.
    pub side: String,
    pub seed: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSection {
    pub kind: String,
    pub b: Option<f64>,
    pub r: Option<f64>,
    /// Switch time in units of the base-cycle period (default 4).
    pub t_c_periods: Option<f64>,
    /// Absolute switch time; overrides `t_c_periods`.
    pub t_c: Option<f64>,
    /// Impulse switch times (absolute).
    pub t_c1: Option<f64>,
    pub t_c2: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub min: f64,
    pub max: f64,
    pub n: usize,
    #[serde(default = "default_scale")]
    pub scale: String,
}

fn default_scale() -> String {
    "linear".into()
}

impl AxisSection {
    pub fn values(&self) -> Result<Vec<f64>, ConfigError> {
        if self.n == 0 {
            return err("axis n must be positive");
        }
        if self.n == 1 {
            return Ok(vec![self.min]);
        }
        match self.scale.as_str() {
            "linear" => Ok((0..self.n)
                .map(|k| self.min + (self.max - self.min) * k as f64 / (self.n - 1) as f64)
                .collect()),
            "log" => {
                if self.min <= 0.0 || self.max <= 0.0 {
                    return err("log axis requires positive bounds");
                }
                let (l0, l1) = (self.min.ln(), self.max.ln());
                Ok((0..self.n)
                    .map(|k| (l0 + (l1 - l0) * k as f64 / (self.n - 1) as f64).exp())
                    .collect())
            }
            other => err(format!("unknown axis scale `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub b: Option<AxisSection>,
    pub r: Option<AxisSection>,
    /// Number of phase columns over [0, 2 pi).
    pub phi_n: Option<usize>,
    /// Switch-time offsets (absolute time units added to the resolved t_c).
    pub tc_offsets: Option<Vec<f64>>,
    /// Magnitudes at which critical rates are extracted.
    pub critical_b: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSection {
    pub x0: Option<[f64; 2]>,
    pub phase: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub x0: [f64; 2],
    pub t_span: f64,
    pub stride: f64,
    /// Apply the [shift] section; otherwise the run is autonomous.
    #[serde(default)]
    pub with_shift: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub param: String,
    pub values: AxisSection,
    pub param2: Option<String>,
    pub values2: Option<AxisSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcsSection {
    /// Driving value at which the separatrix is taken.
    pub theta_at: Option<f64>,
    /// Bisect the instability onset between these driving values.
    pub onset_from: Option<f64>,
    pub onset_to: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSection {
    pub x0_list: Vec<[f64; 2]>,
    pub labels: Option<Vec<String>>,
}

/// The full parsed configuration file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub params: ParamsSection,
    pub tolerances: Option<TolerancesSection>,
    pub cycle_search: Option<CycleSearchSection>,
    pub path: Option<PathSection>,
    pub base: Option<BaseSection>,
    pub shift: Option<ShiftSection>,
    pub grid: Option<GridSection>,
    pub init: Option<InitSection>,
    pub simulate: Option<SimulateSection>,
    pub scan: Option<ScanSection>,
    pub arcs: Option<ArcsSection>,
    pub series: Option<SeriesSection>,
}

/// Parse TOML, apply `--set key=value` overrides on the raw value tree, and
/// deserialize with unknown keys rejected.
pub fn parse_config(text: &str, sets: &[String]) -> Result<RunConfig, ConfigError> {
    let mut value: toml::Value =
        toml::from_str(text).map_err(|e| ConfigError(format!("TOML parse: {e}")))?;
    for set in sets {
        let Some((key, raw)) = set.split_once('=') else {
            return err(format!("--set expects key=value, got `{set}`"));
        };
        let parsed: toml::Value = raw
            .parse::<toml::Value>()
            .unwrap_or_else(|_| toml::Value::String(raw.to_string()));
        let parts: Vec<&str> = key.split('.').collect();
        let mut node = &mut value;
        for part in &parts[..parts.len() - 1] {
            let table = node
                .as_table_mut()
                .ok_or_else(|| ConfigError(format!("--set path `{key}` crosses a non-table")))?;
            node = table
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(Default::default()));
        }
        let table = node
            .as_table_mut()
            .ok_or_else(|| ConfigError(format!("--set path `{key}` crosses a non-table")))?;
        table.insert(parts[parts.len() - 1].to_string(), parsed);
    }
    let cfg: RunConfig = value
        .try_into()
        .map_err(|e| ConfigError(format!("invalid config: {e}")))?;
    Ok(cfg)
}

impl RunConfig {
    /// Resolve the model parameter record, checking completeness, model
    /// membership, and the documented invariants.
    pub fn model_params(&self) -> Result<ModelParams, ConfigError> {
        let p = &self.params;
        match self.run.model.as_str() {
            "vdp" => {
                for (name, val) in
                    [("v", p.v), ("sigma_i", p.sigma_i), ("k_half", p.k_half), ("l", p.l)]
                {
                    if val.is_some() {
                        return err(format!("params.{name} does not belong to the vdp model"));
                    }
                }
                let mu = p.mu.ok_or(ConfigError("params.mu is required".into()))?;
                let alpha = p.alpha.ok_or(ConfigError("params.alpha is required".into()))?;
                let beta = p.beta.ok_or(ConfigError("params.beta is required".into()))?;
                let d = p.d.ok_or(ConfigError("params.d is required".into()))?;
                if mu <= 0.0 || alpha <= 0.0 || beta <= 0.0 {
                    return err("vdp requires mu > 0, alpha > 0, beta > 0");
                }
                Ok(ModelParams::Vdp(VdpParams { mu, alpha, beta, d }))
            }
            "gly" => {
                for (name, val) in [("mu", p.mu), ("alpha", p.alpha), ("beta", p.beta), ("d", p.d)]
                {
                    if val.is_some() {
                        return err(format!("params.{name} does not belong to the gly model"));
                    }
                }
                let v = p.v.ok_or(ConfigError("params.v is required".into()))?;
                let sigma_i = p.sigma_i.ok_or(ConfigError("params.sigma_i is required".into()))?;
                let k_half = p.k_half.ok_or(ConfigError("params.k_half is required".into()))?;
                let l = p.l.ok_or(ConfigError("params.l is required".into()))?;
                let sigma_m = p.sigma_m.ok_or(ConfigError("params.sigma_m is required".into()))?;
                let n = p.n.ok_or(ConfigError("params.n is required".into()))?;
                let q = p.q.ok_or(ConfigError("params.q is required".into()))?;
                let k_s = p.k_s.ok_or(ConfigError("params.k_s is required".into()))?;
                if v < 0.0 || sigma_i < 0.0 {
                    return err("gly requires v >= 0 and sigma_i >= 0");
                }
                if k_half <= 0.0 || l <= 0.0 || sigma_m <= 0.0 || q <= 0.0 || k_s <= 0.0 {
                    return err("gly requires positive k_half, l, sigma_m, q, k_s");
                }
                if n < 3 {
                    return err("gly requires Hill coefficient n >= 3");
                }
                Ok(ModelParams::Gly(GlyParams { v, sigma_i, k_half, l, sigma_m, n, q, k_s }))
            }
            other => err(format!("unknown model `{other}` (expected vdp or gly)")),
        }
    }

    pub fn integrator(&self) -> Result<IntegratorConfig, ConfigError> {
        let mut cfg = IntegratorConfig::default();
        if let Some(t) = &self.tolerances {
            if let Some(rel) = t.rel {
                cfg.rel_tol = rel;
            }
            if let Some(abs) = t.abs {
                cfg.abs_tol = abs;
            }
            if let Some(ms) = t.max_step {
                cfg.max_step = ms;
            }
            if let Some(mt) = t.max_time {
                cfg.max_time = mt;
            }
        }
        if !(cfg.rel_tol > 0.0 && cfg.rel_tol <= 1e-3) {
            return err("tolerances.rel must be in (0, 1e-3]");
        }
        if cfg.abs_tol <= 0.0 {
            return err("tolerances.abs must be positive");
        }
        Ok(cfg)
    }

    pub fn cycle_search(&self) -> CycleSearchCfg {
        let mut cfg = CycleSearchCfg::default();
        if let Some(c) = &self.cycle_search {
            if let Some(v) = c.return_tol {
                cfg.return_tol = v;
            }
            if let Some(v) = c.max_returns {
                cfg.max_returns = v;
            }
            if let Some(v) = c.samples {
                cfg.samples = v;
            }
            if let Some(v) = c.first_return_budget {
                cfg.first_return_budget = v;
            }
            if let Some(v) = c.escape_radius {
                cfg.escape_radius = v;
            }
        }
        cfg
    }

    pub fn parameter_path(&self) -> Result<ParameterPath, ConfigError> {
        let section = self
            .path
            .as_ref()
            .ok_or(ConfigError("this analysis requires a [path] section".into()))?;
        let driver = ParamKey::parse(&section.param)
            .ok_or_else(|| ConfigError(format!("unknown path.param `{}`", section.param)))?;
        let mut path = ParameterPath::new(driver);
        if let Some(b_max) = section.b_max {
            path = path.with_b_max(b_max);
        }
        if let Some(sl) = &section.slaved {
            let key = ParamKey::parse(&sl.param)
                .ok_or_else(|| ConfigError(format!("unknown path.slaved.param `{}`", sl.param)))?;
            path = path.with_slaved(SlavedParam { key, c0: sl.c0, c1: sl.c1 });
        }
        Ok(path)
    }

    pub fn base_side(&self) -> Result<BaseSide, ConfigError> {
        let base =
            self.base.as_ref().ok_or(ConfigError("this analysis requires a [base] section".into()))?;
        match base.side.as_str() {
            "outer" => Ok(BaseSide::Outer),
            "inner" => Ok(BaseSide::Inner),
            other => err(format!("base.side must be `outer` or `inner`, got `{other}`")),
        }
    }

    pub fn base_seed(&self) -> Result<State, ConfigError> {
        let base =
            self.base.as_ref().ok_or(ConfigError("this analysis requires a [base] section".into()))?;
        Ok(State::new(base.seed[0], base.seed[1]))
    }

    pub fn shift_kind(&self) -> Result<ShiftKind, ConfigError> {
        let shift =
            self.shift.as_ref().ok_or(ConfigError("this analysis requires a [shift] section".into()))?;
        match shift.kind.as_str() {
            "monotone" => Ok(ShiftKind::Monotone),
            "nonmonotone" => Ok(ShiftKind::Nonmonotone),
            "impulse" => Ok(ShiftKind::Impulse),
            other => err(format!("unknown shift.kind `{other}`")),
        }
    }

    /// Resolve the switch time given the base-cycle period.
    pub fn resolve_t_c(&self, base_period: f64) -> Result<f64, ConfigError> {
        let shift =
            self.shift.as_ref().ok_or(ConfigError("this analysis requires a [shift] section".into()))?;
        if let Some(t_c) = shift.t_c {
            return Ok(t_c);
        }
        Ok(shift.t_c_periods.unwrap_or(4.0) * base_period)
    }

    /// Build the configured shift for a single run (needs b, r resolved).
    pub fn build_shift(&self, level: f64, base_period: f64) -> Result<InputShift, ConfigError> {
        let kind = self.shift_kind()?;
        let shift = self.shift.as_ref().expect("shift checked by shift_kind");
        let b = shift.b.ok_or(ConfigError("shift.b is required".into()))?;
        let r = shift.r.ok_or(ConfigError("shift.r is required".into()))?;
        if r <= 0.0 {
            return err("shift.r must be positive");
        }
        if b < 0.0 {
            return err("shift.b must be non-negative");
        }
        Ok(match kind {
            ShiftKind::Impulse => {
                let t_c1 = shift.t_c1.ok_or(ConfigError("shift.t_c1 is required".into()))?;
                let t_c2 = shift.t_c2.ok_or(ConfigError("shift.t_c2 is required".into()))?;
                if t_c2 <= t_c1 {
                    return err("impulse requires t_c2 > t_c1");
                }
                InputShift::impulse(level, b, r, t_c1, t_c2)
            }
            ShiftKind::Monotone => InputShift::monotone(level, b, r, self.resolve_t_c(base_period)?),
            ShiftKind::Nonmonotone => {
                InputShift::nonmonotone(level, b, r, self.resolve_t_c(base_period)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[run]
model = "vdp"

[params]
mu = 1.52
alpha = 0.0936
beta = 0.001945
d = -0.03
"#;

    #[test]
    fn parses_minimal_config() {
        let cfg = parse_config(MINIMAL, &[]).unwrap();
        assert!(matches!(cfg.model_params().unwrap(), ModelParams::Vdp(_)));
    }

    #[test]
    fn rejects_unknown_keys_by_name() {
        let text = format!("{MINIMAL}\n[shift]\nkind = \"monotone\"\nbanana = 1\n");
        let e = parse_config(&text, &[]).unwrap_err();
        assert!(e.0.contains("banana"), "{e}");
    }

    #[test]
    fn set_overrides_apply() {
        let cfg = parse_config(MINIMAL, &["params.mu=0.6".into()]).unwrap();
        let ModelParams::Vdp(p) = cfg.model_params().unwrap() else { panic!() };
        assert_eq!(p.mu, 0.6);
    }

    #[test]
    fn rejects_wrong_model_keys() {
        let text = format!("{MINIMAL}\n");
        let mut cfg = parse_config(&text, &["params.v=0.1".into()]).unwrap();
        assert!(cfg.model_params().is_err());
        cfg.params.v = None;
        assert!(cfg.model_params().is_ok());
    }

    #[test]
    fn log_axis_is_geometric() {
        let axis = AxisSection { min: 1.0, max: 100.0, n: 3, scale: "log".into() };
        let v = axis.values().unwrap();
        assert!((v[1] - 10.0).abs() < 1e-12);
    }
}
