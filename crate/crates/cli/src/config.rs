use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use coonsfit::augment::AugmentParams;
use coonsfit::fit::FitConfig;
use coonsfit::intersect::{SampleKind, TrainConfig};
use coonsfit::losses::LossOptions;

/// Prefix of environment overrides: `COONSFIT_FIT__STEP=1e-3` sets
/// `fit.step`.
pub const ENV_PREFIX: &str = "COONSFIT_";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub kind: SampleKind,
    pub count: usize,
    /// Tessellation resolution of the labeling oracle.
    pub resolution: usize,
    pub seed: u64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            kind: SampleKind::SelfIntersection,
            count: 10_000,
            resolution: coonsfit::intersect::LABEL_RESOLUTION,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentSection {
    pub params: AugmentParams,
    pub widths: Vec<f64>,
    /// Augmented copies per input drawing.
    pub count: usize,
    pub out_size: usize,
    pub seed: u64,
    pub hook: Option<String>,
}

impl Default for AugmentSection {
    fn default() -> Self {
        let b = coonsfit::augment::BatchConfig::default();
        AugmentSection {
            params: b.params,
            widths: b.widths,
            count: b.count,
            out_size: b.out_size,
            seed: b.seed,
            hook: b.hook,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub patch_samples: usize,
    pub target_samples: usize,
    pub target_pool: usize,
    pub seed: u64,
    pub loss: LossOptions,
}

impl Default for EvalConfig {
    fn default() -> Self {
        let f = FitConfig::default();
        EvalConfig {
            patch_samples: f.patch_samples,
            target_samples: f.target_samples,
            target_pool: 100_000,
            seed: 0,
            loss: f.loss,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TessellateConfig {
    /// Grid resolution per patch side.
    pub n: usize,
}

impl Default for TessellateConfig {
    fn default() -> Self {
        TessellateConfig { n: 8 }
    }
}

/// Every setting of every subcommand.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub fit: FitConfig,
    pub dataset: DatasetConfig,
    pub train: TrainConfig,
    pub augment: AugmentSection,
    pub tessellate: TessellateConfig,
    pub eval: EvalConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Applies `section.field=value` assignments. Values are parsed as
    /// JSON when possible and taken as strings otherwise.
    pub fn with_overrides<'a>(self, sets: impl IntoIterator<Item = (String, &'a str)>) -> Result<Self> {
        let mut tree = serde_json::to_value(&self)?;
        for (key, raw) in sets {
            let slot = key
                .split('.')
                .try_fold(&mut tree, |node, part| node.get_mut(part))
                .ok_or_else(|| anyhow!("unknown config key `{key}`"))?;
            if slot.is_object() {
                bail!("`{key}` is a section, not a field");
            }
            *slot = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        }
        serde_json::from_value(tree).context("invalid override value")
    }

    /// Overrides from `COONSFIT_SECTION__FIELD` variables.
    pub fn with_env(self, vars: impl IntoIterator<Item = (String, String)>) -> Result<Self> {
        let sets: Vec<(String, String)> = vars
            .into_iter()
            .filter_map(|(k, v)| {
                let rest = k.strip_prefix(ENV_PREFIX)?;
                rest.contains("__").then(|| (rest.to_ascii_lowercase().replace("__", "."), v))
            })
            .collect();
        self.with_overrides(sets.iter().map(|(k, v)| (k.clone(), v.as_str())))
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.fit.seed = seed;
        self.dataset.seed = seed;
        self.train.seed = seed;
        self.augment.seed = seed;
        self.eval.seed = seed;
    }
}

/// `key = default` for every leaf field.
pub fn field_listing() -> String {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<String>) {
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, child, out);
                }
            }
            other => out.push(format!("  {prefix} = {other}")),
        }
    }
    let mut out = Vec::new();
    walk("", &serde_json::to_value(RunConfig::default()).expect("config serializes"), &mut out);
    out.join("\n")
}
