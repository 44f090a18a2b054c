//! Run configuration: a flat map of dotted keys with defaults, a JSON file layer and
//! command-line overrides, in that order of increasing precedence.

use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::CliError;
use crate::analysis::{AdjudicationConfig, ConditionGrid};
use crate::equations::{SignVariant, WForm};
use crate::integrator::{Direction, IntegrationConfig};
use crate::metric::{ModelPair, ProfileSpec};
use crate::shooting::{CGrid, Regime};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    CheckConditions,
    Integrate,
    Shoot,
    Sweep,
    AdjudicateSign,
    Monitors,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::CheckConditions,
        Command::Integrate,
        Command::Shoot,
        Command::Sweep,
        Command::AdjudicateSign,
        Command::Monitors,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::CheckConditions => "check-conditions",
            Command::Integrate => "integrate",
            Command::Shoot => "shoot",
            Command::Sweep => "sweep",
            Command::AdjudicateSign => "adjudicate-sign",
            Command::Monitors => "monitors",
        }
    }
}

fn defaults() -> BTreeMap<&'static str, Value> {
    let icfg = IntegrationConfig::default();
    let grid = ConditionGrid::default();
    let adj = AdjudicationConfig::default();
    let entries: Vec<(&'static str, Value)> = vec![
        ("command", "check-conditions".into()),
        ("output_dir", "out".into()),
        ("pair.n", 3.into()),
        ("pair.profile.family", "hyperbolic".into()),
        ("pair.profile.params", Value::Array(vec![])),
        ("pair.profile.coefficients", Value::Array(vec![])),
        ("integration.rel_tol", icfg.rel_tol.into()),
        ("integration.abs_tol", icfg.abs_tol.into()),
        ("integration.max_steps", icfg.max_steps.into()),
        ("integration.r_start", icfg.r_start.into()),
        ("integration.r_end", icfg.r_end.into()),
        ("integration.y_cap", icfg.y_cap.into()),
        ("integration.yp_zero_tol", icfg.yp_zero_tol.into()),
        (
            "integration.far_field_decades",
            icfg.far_field_decades.into(),
        ),
        ("integrate.y0", icfg.r_start.into()),
        ("integrate.yp0", 1.0.into()),
        ("integrate.direction", "forward".into()),
        ("shoot.regime", "origin_regular".into()),
        ("shoot.c", 1.0.into()),
        ("sweep.regime", "origin_regular".into()),
        ("sweep.c_grid.count", 61.into()),
        ("sweep.c_grid.min", 1e-3.into()),
        ("sweep.c_grid.max", 1e3.into()),
        ("conditions.r_min", grid.r_min.into()),
        ("conditions.r_max", grid.r_max.into()),
        ("conditions.count", grid.count.into()),
        ("adjudication.c", adj.c.into()),
        ("adjudication.r_start", adj.r_start.into()),
        ("adjudication.r_end", adj.r_end.into()),
        ("adjudication.rel_tol", adj.rel_tol.into()),
        ("adjudication.abs_tol", adj.abs_tol.into()),
        ("adjudication.per_decade", adj.per_decade.into()),
        ("adjudication.levels", adj.levels.into()),
        ("monitors.regime", "infinity_decay".into()),
        ("monitors.c", 0.1.into()),
        ("monitors.variant", "as_printed".into()),
        ("monitors.w_form", "printed".into()),
    ];
    entries.into_iter().collect()
}

/// Every key a configuration may set.
pub fn known_keys() -> Vec<&'static str> {
    defaults().into_keys().collect()
}

/// Flatten nested objects into dotted keys; arrays are leaf values.
fn flatten(prefix: &str, obj: &Map<String, Value>, out: &mut BTreeMap<String, Value>) {
    for (k, v) in obj {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Object(inner) => flatten(&key, inner, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

/// Raw layered configuration before typing.
#[derive(Debug, Clone, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, Value>,
}

impl RawConfig {
    pub fn defaults() -> Self {
        RawConfig {
            values: defaults()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }

    fn set(&mut self, key: &str, value: Value, origin: &str) -> Result<(), CliError> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(CliError::Config {
                key: key.to_string(),
                message: format!("unknown config key ({origin})"),
            }),
        }
    }

    /// Merge a JSON document; nested objects and dotted keys may be mixed.
    pub fn merge_json(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Config {
            key: "<file>".into(),
            message: format!("{origin}: invalid JSON: {e}"),
        })?;
        let Value::Object(obj) = doc else {
            return Err(CliError::Config {
                key: "<file>".into(),
                message: format!("{origin}: top level must be a JSON object"),
            });
        };
        let mut flat = BTreeMap::new();
        flatten("", &obj, &mut flat);
        for (k, v) in flat {
            self.set(&k, v, origin)?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            key: "<file>".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        self.merge_json(&text, &path.display().to_string())
    }

    /// Apply `--key.path value` pairs. Values are read as JSON when they parse, otherwise as
    /// plain strings, so `--pair.n 3` and `--sweep.regime infinity_decay` both work.
    pub fn merge_overrides(&mut self, args: &[String]) -> Result<(), CliError> {
        let mut it = args.iter();
        while let Some(flag) = it.next() {
            let (key, inline) = match flag.strip_prefix("--") {
                Some(rest) => match rest.split_once('=') {
                    Some((k, v)) => (k, Some(v.to_string())),
                    None => (rest, None),
                },
                None => {
                    return Err(CliError::Config {
                        key: flag.clone(),
                        message: "expected a `--key.path value` override".into(),
                    })
                }
            };
            let raw = match inline {
                Some(v) => v,
                None => it.next().cloned().ok_or_else(|| CliError::Config {
                    key: key.to_string(),
                    message: "override is missing its value".into(),
                })?,
            };
            let value = serde_json::from_str(&raw).unwrap_or(Value::String(raw));
            self.set(key, value, "command line")?;
        }
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.values.iter()
    }

    fn get(&self, key: &str) -> &Value {
        self.values
            .get(key)
            .unwrap_or_else(|| panic!("config key `{key}` has no default"))
    }

    fn err(key: &str, message: impl Into<String>) -> CliError {
        CliError::Config {
            key: key.to_string(),
            message: message.into(),
        }
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        match self.get(key).as_f64() {
            Some(v) if v.is_finite() => Ok(v),
            _ => Err(Self::err(
                key,
                format!("expected a finite number, got {}", self.get(key)),
            )),
        }
    }

    pub fn int(&self, key: &str) -> Result<i64, CliError> {
        self.get(key)
            .as_i64()
            .ok_or_else(|| Self::err(key, format!("expected an integer, got {}", self.get(key))))
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        self.get(key)
            .as_u64()
            .and_then(|v| usize::try_from(v).ok())
            .ok_or_else(|| {
                Self::err(
                    key,
                    format!("expected a nonnegative integer, got {}", self.get(key)),
                )
            })
    }

    pub fn str(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .as_str()
            .ok_or_else(|| Self::err(key, format!("expected a string, got {}", self.get(key))))
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let bad = || {
            Self::err(
                key,
                format!("expected an array of finite numbers, got {}", self.get(key)),
            )
        };
        self.get(key)
            .as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|v| v.as_f64().filter(|x| x.is_finite()).ok_or_else(bad))
            .collect()
    }

    fn choice<T: Copy>(&self, key: &str, options: &[(&str, T)]) -> Result<T, CliError> {
        let s = self.str(key)?;
        options
            .iter()
            .find(|(name, _)| *name == s)
            .map(|(_, v)| *v)
            .ok_or_else(|| {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                Self::err(
                    key,
                    format!("unknown value `{s}`, expected one of {names:?}"),
                )
            })
    }
}

/// Typed run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub output_dir: PathBuf,
    pub pair: ModelPair,
    pub integration: IntegrationConfig,
    pub integrate_init: (f64, f64),
    pub integrate_direction: Direction,
    pub shoot_regime: Regime,
    pub shoot_c: f64,
    pub sweep_regime: Regime,
    pub sweep_grid: CGrid,
    pub conditions: ConditionGrid,
    pub adjudication: AdjudicationConfig,
    pub monitors_regime: Regime,
    pub monitors_c: f64,
    pub monitors_variant: SignVariant,
    pub monitors_w_form: WForm,
}

const REGIMES: [(&str, Regime); 2] = [
    ("origin_regular", Regime::OriginRegular),
    ("infinity_decay", Regime::InfinityDecay),
];

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, CliError> {
        let commands: Vec<(&str, Command)> = Command::ALL.iter().map(|c| (c.name(), *c)).collect();
        let command = raw.choice("command", &commands)?;

        let n = raw.int("pair.n")?;
        let profile = ProfileSpec {
            family: raw.str("pair.profile.family")?.to_string(),
            params: raw.f64_list("pair.profile.params")?,
            coefficients: raw.f64_list("pair.profile.coefficients")?,
        }
        .to_profile()
        .map_err(|e| RawConfig::err("pair.profile", e.to_string()))?;
        let pair = ModelPair::new(n, profile)
            .map_err(|e| RawConfig::err("pair.n", format!("{e}; both model spaces need n >= 2")))?;

        let integration = IntegrationConfig {
            rel_tol: raw.f64("integration.rel_tol")?,
            abs_tol: raw.f64("integration.abs_tol")?,
            max_steps: raw.usize("integration.max_steps")?,
            r_start: raw.f64("integration.r_start")?,
            r_end: raw.f64("integration.r_end")?,
            y_cap: raw.f64("integration.y_cap")?,
            yp_zero_tol: raw.f64("integration.yp_zero_tol")?,
            far_field_decades: raw.f64("integration.far_field_decades")?,
        };
        integration
            .validate()
            .map_err(|e| RawConfig::err("integration", e.to_string()))?;

        let sweep_grid = CGrid {
            count: raw.usize("sweep.c_grid.count")?,
            min: raw.f64("sweep.c_grid.min")?,
            max: raw.f64("sweep.c_grid.max")?,
        };
        sweep_grid
            .validate()
            .map_err(|e| RawConfig::err("sweep.c_grid", e.to_string()))?;

        let conditions = ConditionGrid {
            r_min: raw.f64("conditions.r_min")?,
            r_max: raw.f64("conditions.r_max")?,
            count: raw.usize("conditions.count")?,
        };
        conditions
            .validate()
            .map_err(|e| RawConfig::err("conditions", e))?;

        let adjudication = AdjudicationConfig {
            c: raw.f64("adjudication.c")?,
            r_start: raw.f64("adjudication.r_start")?,
            r_end: raw.f64("adjudication.r_end")?,
            rel_tol: raw.f64("adjudication.rel_tol")?,
            abs_tol: raw.f64("adjudication.abs_tol")?,
            per_decade: raw.usize("adjudication.per_decade")?,
            levels: raw.usize("adjudication.levels")?,
        };
        adjudication
            .validate()
            .map_err(|e| RawConfig::err("adjudication", e.to_string()))?;

        let positive = |key: &str| -> Result<f64, CliError> {
            let v = raw.f64(key)?;
            if v > 0.0 {
                Ok(v)
            } else {
                Err(RawConfig::err(key, format!("must be positive, got {v}")))
            }
        };

        Ok(RunConfig {
            command,
            output_dir: PathBuf::from(raw.str("output_dir")?),
            pair,
            integration,
            integrate_init: (raw.f64("integrate.y0")?, raw.f64("integrate.yp0")?),
            integrate_direction: raw.choice(
                "integrate.direction",
                &[
                    ("forward", Direction::Forward),
                    ("backward", Direction::Backward),
                ],
            )?,
            shoot_regime: raw.choice("shoot.regime", &REGIMES)?,
            shoot_c: positive("shoot.c")?,
            sweep_regime: raw.choice("sweep.regime", &REGIMES)?,
            sweep_grid,
            conditions,
            adjudication,
            monitors_regime: raw.choice("monitors.regime", &REGIMES)?,
            monitors_c: positive("monitors.c")?,
            monitors_variant: raw.choice(
                "monitors.variant",
                &[
                    ("as_printed", SignVariant::AsPrinted),
                    ("corrected", SignVariant::Corrected),
                ],
            )?,
            monitors_w_form: raw.choice(
                "monitors.w_form",
                &[
                    ("printed", WForm::Printed),
                    ("alternative", WForm::Alternative),
                ],
            )?,
        })
    }

    /// Defaults, then the optional file, then overrides.
    pub fn load(file: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut raw = RawConfig::defaults();
        if let Some(path) = file {
            raw.merge_file(path)?;
        }
        raw.merge_overrides(overrides)?;
        Self::from_raw(&raw)
    }
}
