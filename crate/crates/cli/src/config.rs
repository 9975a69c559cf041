//! Effective solver configuration: preset, then config file, then flags.

use std::path::Path;

use adaptforge::baselines::{AdaptConfig, QebConfig};
use adaptforge::ladder::{LadderConfig, Preset};
use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

/// Sections of a `--config` file. Each is a partial object laid over the
/// corresponding defaults.
#[derive(Debug, Default)]
pub struct ConfigFile {
    pub ladder: Option<Value>,
    pub adapt: Option<Value>,
    pub qeb: Option<Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("failed to read {}", path.display()))?;
        let value: Value = serde_json::from_str(&text).with_context(|| format!("failed to parse {}", path.display()))?;
        let Value::Object(mut map) = value else {
            bail!("{}: config file must be a JSON object", path.display());
        };
        let cfg = ConfigFile {
            ladder: map.remove("ladder"),
            adapt: map.remove("adapt"),
            qeb: map.remove("qeb"),
        };
        if let Some(key) = map.keys().next() {
            bail!("{}: unknown config section `{key}` (expected ladder, adapt, qeb)", path.display());
        }
        Ok(cfg)
    }
}

fn overlay<T: Serialize + DeserializeOwned>(base: &T, patch: Option<&Value>, what: &str) -> Result<T> {
    let Some(patch) = patch else {
        return Ok(serde_json::from_value(serde_json::to_value(base)?)?);
    };
    let Value::Object(fields) = patch else {
        bail!("config section `{what}` must be a JSON object");
    };
    let mut merged = serde_json::to_value(base)?;
    let obj = merged.as_object_mut().expect("configs serialize to objects");
    for (k, v) in fields {
        obj.insert(k.clone(), v.clone());
    }
    serde_json::from_value(merged).with_context(|| format!("invalid `{what}` config"))
}

/// Preset argument: a shipped preset name or a path to a full preset file.
pub fn base_ladder(molecule: &str, preset: Option<&str>) -> Result<LadderConfig> {
    match preset {
        Some(p) => match p.parse::<Preset>() {
            Ok(name) => Ok(LadderConfig::preset(name)?),
            Err(_) => Ok(LadderConfig::from_path(Path::new(p))?),
        },
        None => Ok(LadderConfig::preset(molecule.parse().unwrap_or(Preset::Custom))?),
    }
}

pub fn ladder(molecule: &str, preset: Option<&str>, file: &ConfigFile, level: Option<u8>) -> Result<LadderConfig> {
    let mut cfg = overlay(&base_ladder(molecule, preset)?, file.ladder.as_ref(), "ladder")?;
    if let Some(level) = level {
        cfg.level = level;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn adapt(file: &ConfigFile) -> Result<AdaptConfig> {
    let cfg: AdaptConfig = overlay(&AdaptConfig::default(), file.adapt.as_ref(), "adapt")?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn qeb(molecule: &str, file: &ConfigFile) -> Result<QebConfig> {
    let cfg: QebConfig = overlay(&QebConfig::for_molecule(molecule), file.qeb.as_ref(), "qeb")?;
    cfg.validate()?;
    Ok(cfg)
}
