//! Job configuration: a JSON document plus dotted-name overrides.

use gauge_core::measure::Stieltjes;
use gauge_core::{
    Execution, IntegrateOptions, Measure, Schedule, SpaceDescriptor, SubdivisionPolicy,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::expr;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// Derived from the measure when absent.
    #[serde(default)]
    pub space: Option<SpaceDescriptor>,
    #[serde(default)]
    pub measure: MeasureSpec,
    #[serde(default = "default_integrand")]
    pub integrand: String,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub schedule: Option<Schedule>,
    #[serde(default)]
    pub policy: PolicySpec,
    /// Inclusive level range for convergence studies, `"a..b"` or `"n"`.
    #[serde(default = "default_levels")]
    pub levels: String,
    /// Cantor weight for transfer runs.
    #[serde(default = "default_p0")]
    pub p0: f64,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_integrand() -> String {
    "linear".into()
}

fn default_epsilon() -> f64 {
    1e-6
}

fn default_levels() -> String {
    "1..12".into()
}

fn default_p0() -> f64 {
    0.5
}

impl Default for JobConfig {
    fn default() -> Self {
        serde_json::from_value(Value::Object(Default::default())).expect("defaults deserialize")
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureSpec {
    #[default]
    Lebesgue,
    /// Normalised Lebesgue measure on the box of the configured space.
    LebesgueBox,
    /// `(1 − Σ mass)·dF + Σ mass·δ_at` with `F` given as an expression in `x`.
    Stieltjes {
        cdf: String,
        #[serde(default)]
        atoms: Vec<(f64, f64)>,
    },
    CantorIfs {
        p0: f64,
    },
    Pushforward {
        p0: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub max_depth: Option<u32>,
    #[serde(default = "default_max_levels")]
    pub max_levels: usize,
    #[serde(default)]
    pub execution: Execution,
}

fn default_replicates() -> usize {
    8
}

fn default_max_levels() -> usize {
    40
}

impl Default for PolicySpec {
    fn default() -> Self {
        PolicySpec {
            seed: 0,
            replicates: default_replicates(),
            max_depth: None,
            max_levels: default_max_levels(),
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<JobConfig, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    /// Sets the field at a dotted path, e.g. `policy.seed` or `measure.p0`.
    ///
    /// The value is read as JSON when it parses as JSON and as a string
    /// otherwise. A bare string for `measure` or `space` names its `kind`.
    pub fn apply_override(&mut self, path: &str, raw: &str) -> Result<(), CliError> {
        self.apply_overrides(&[(path.to_string(), raw.to_string())])
    }

    /// Applies overrides in order and validates the result once, so that
    /// `measure=cantor-ifs` followed by `measure.p0=0.25` is accepted.
    pub fn apply_overrides(&mut self, overrides: &[(String, String)]) -> Result<(), CliError> {
        let mut doc = serde_json::to_value(&*self).expect("config serializes");
        for (path, raw) in overrides {
            let keys: Vec<&str> = path.split('.').collect();
            if keys.iter().any(|k| k.is_empty()) {
                return Err(CliError::Config(format!("malformed override name '{path}'")));
            }
            let mut value = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.clone()));
            if matches!(keys[..], ["measure"] | ["space"]) && value.is_string() {
                value = serde_json::json!({ "kind": value });
            }
            let mut slot = &mut doc;
            for k in &keys {
                if !slot.is_object() {
                    *slot = Value::Object(Default::default());
                }
                slot = slot
                    .as_object_mut()
                    .expect("object")
                    .entry(k.to_string())
                    .or_insert(Value::Null);
            }
            *slot = value;
        }
        *self = serde_json::from_value(doc).map_err(|e| {
            let names: Vec<&str> = overrides.iter().map(|(p, _)| p.as_str()).collect();
            CliError::Config(format!("invalid override ({}): {e}", names.join(", ")))
        })?;
        Ok(())
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space.clone().unwrap_or_else(|| match &self.measure {
            MeasureSpec::CantorIfs { .. } => SpaceDescriptor::Cantor,
            MeasureSpec::LebesgueBox => SpaceDescriptor::unit_cube(2),
            _ => SpaceDescriptor::unit_interval(),
        })
    }

    pub fn measure(&self) -> Result<Measure, CliError> {
        let space = self.space();
        space.validate()?;
        let m = match (&self.measure, &space) {
            (MeasureSpec::Lebesgue, SpaceDescriptor::Interval { .. }) => Measure::Lebesgue,
            (MeasureSpec::LebesgueBox, SpaceDescriptor::Box { bounds, .. }) => {
                Measure::lebesgue_box(bounds.clone())?
            }
            (MeasureSpec::Stieltjes { cdf, atoms }, SpaceDescriptor::Interval { .. }) => {
                let e = expr::parse(cdf).map_err(|err| CliError::Config(format!("cdf: {err}")))?;
                if let Some(v) = e.variables().into_iter().find(|v| v != "x") {
                    return Err(CliError::Config(format!("cdf may only use x, found {v}")));
                }
                let label = e.to_string();
                let s = Stieltjes::new(label, move |t| e.eval(&|_| t), atoms.clone())?;
                Measure::Stieltjes(s)
            }
            (MeasureSpec::CantorIfs { p0 }, SpaceDescriptor::Cantor) => Measure::cantor_ifs(*p0)?,
            (MeasureSpec::Pushforward { p0 }, SpaceDescriptor::Interval { .. }) => {
                Measure::pushforward(*p0)?
            }
            (m, s) => {
                return Err(CliError::Config(format!(
                    "measure {} does not live on a {} space",
                    measure_kind(m),
                    s.kind()
                )))
            }
        };
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(CliError::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.policy.replicates == 0 || self.policy.max_levels == 0 {
            return Err(CliError::Config("replicates and max_levels must be at least 1".into()));
        }
        if let Some(Schedule::ShrinkingConstant { c0 }) = self.schedule {
            if !(c0 > 0.0) {
                return Err(CliError::Config(format!("schedule c0 must be positive, got {c0}")));
            }
        }
        self.level_range()?;
        self.measure()?;
        Ok(())
    }

    pub fn level_range(&self) -> Result<std::ops::RangeInclusive<usize>, CliError> {
        let bad = || CliError::Config(format!("levels must be 'a..b' or 'n', got '{}'", self.levels));
        let range = match self.levels.split_once("..") {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                a..=b
            }
            None => 1..=self.levels.trim().parse().map_err(|_| bad())?,
        };
        if range.is_empty() {
            return Err(bad());
        }
        Ok(range)
    }

    pub fn options(&self) -> IntegrateOptions {
        let space = self.space();
        let mut policy = SubdivisionPolicy::default()
            .with_seed(self.policy.seed)
            .with_execution(self.policy.execution);
        policy.basis = space.basis();
        policy.max_depth = self.policy.max_depth;
        IntegrateOptions {
            schedule: self.schedule,
            replicates: self.policy.replicates,
            max_levels: self.policy.max_levels,
            policy,
        }
    }
}

fn measure_kind(m: &MeasureSpec) -> &'static str {
    match m {
        MeasureSpec::Lebesgue => "lebesgue",
        MeasureSpec::LebesgueBox => "lebesgue-box",
        MeasureSpec::Stieltjes { .. } => "stieltjes",
        MeasureSpec::CantorIfs { .. } => "cantor-ifs",
        MeasureSpec::Pushforward { .. } => "pushforward",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_follow_dotted_names() {
        let mut c = JobConfig::default();
        c.apply_override("policy.seed", "42").unwrap();
        c.apply_override("epsilon", "1e-3").unwrap();
        c.apply_override("integrand", "x^2").unwrap();
        c.apply_override("measure", r#"{"kind":"cantor-ifs","p0":0.25}"#).unwrap();
        c.apply_override("measure.p0", "0.75").unwrap();
        let mut d = JobConfig::default();
        d.apply_overrides(&[("measure".into(), "pushforward".into()), ("measure.p0".into(), "0.3".into())])
            .unwrap();
        assert_eq!(d.measure, MeasureSpec::Pushforward { p0: 0.3 });
        assert_eq!(c.policy.seed, 42);
        assert_eq!(c.epsilon, 1e-3);
        assert_eq!(c.integrand, "x^2");
        assert_eq!(c.measure, MeasureSpec::CantorIfs { p0: 0.75 });
        assert_eq!(c.space(), SpaceDescriptor::Cantor);
        assert!(c.apply_override("policy.bogus", "1").is_err());
        assert!(c.apply_override("policy..seed", "1").is_err());
    }

    #[test]
    fn levels_and_validation() {
        let mut c = JobConfig::default();
        assert_eq!(c.level_range().unwrap(), 1..=12);
        c.levels = "3".into();
        assert_eq!(c.level_range().unwrap(), 1..=3);
        c.levels = "5..2".into();
        assert!(c.validate().is_err());
        let c = JobConfig {
            measure: MeasureSpec::CantorIfs { p0: 0.5 },
            space: Some(SpaceDescriptor::unit_interval()),
            ..JobConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_documents_parse() {
        let c = JobConfig::from_json(
            r#"{"space":{"kind":"interval","basis":{"dense":"dyadic"}},
                "measure":{"kind":"stieltjes","cdf":"x^2","atoms":[[0.5,0.1]]},
                "integrand":"square","epsilon":1e-4,
                "schedule":{"kind":"shrinking-constant","c0":0.25},
                "policy":{"seed":7,"execution":"sequential"}}"#,
        )
        .unwrap();
        c.validate().unwrap();
        assert_eq!(c.options().policy.seed, 7);
        assert!(JobConfig::from_json(r#"{"unknown":1}"#).is_err());
    }
}
