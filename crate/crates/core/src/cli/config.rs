//! Config file, utility parameter resolution and run manifests.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CliError;
use crate::utility::{TpTail, UtilityParams, DEFAULT_PRESET};

/// Optional TOML config. Every value here is overridden by the matching flag.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub workers: Option<usize>,
    #[serde(default)]
    pub label: LabelSection,
    pub utility: Option<UtilitySection>,
    #[serde(default)]
    pub kappa: KappaSection,
    #[serde(default)]
    pub tree_dist: TreeDistSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub synth: SynthSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelSection {
    pub lead: Option<i64>,
    pub truncate: Option<bool>,
}

/// A preset name plus field overrides.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilitySection {
    pub preset: Option<String>,
    pub dt_early: Option<f64>,
    pub dt_optimal: Option<f64>,
    pub dt_late: Option<f64>,
    pub u_tp_max: Option<f64>,
    pub u_fn_min: Option<f64>,
    pub u_fp: Option<f64>,
    pub u_tn: Option<f64>,
    pub tp_tail: Option<TpTail>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaSection {
    pub top: Option<usize>,
    pub bins: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDistSection {
    pub insert: Option<f64>,
    pub delete: Option<f64>,
    pub relabel: Option<f64>,
    pub cap: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub familiar_rule: Option<String>,
    pub unfamiliar_rule: Option<String>,
    pub tau: Option<f64>,
    pub separate_regimes: Option<bool>,
    pub max_steps: Option<usize>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub seed: Option<u64>,
    pub patients: Option<usize>,
    pub min_hours: Option<usize>,
    pub max_hours: Option<usize>,
    pub prevalence: Option<f64>,
    pub lead: Option<i64>,
    pub algorithms: Option<usize>,
    pub fp_rate: Option<f64>,
    pub fn_rate: Option<f64>,
    pub max_lag: Option<u32>,
    pub rho: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

impl UtilitySection {
    fn resolve(&self) -> Result<UtilityParams, CliError> {
        let name = self.preset.as_deref().unwrap_or(DEFAULT_PRESET);
        let mut p = UtilityParams::preset(name)
            .ok_or_else(|| CliError::Usage(format!("unknown utility preset `{name}`")))?;
        let fields = [
            (&mut p.dt_early, self.dt_early),
            (&mut p.dt_optimal, self.dt_optimal),
            (&mut p.dt_late, self.dt_late),
            (&mut p.u_tp_max, self.u_tp_max),
            (&mut p.u_fn_min, self.u_fn_min),
            (&mut p.u_fp, self.u_fp),
            (&mut p.u_tn, self.u_tn),
        ];
        for (slot, value) in fields {
            if let Some(v) = value {
                *slot = v;
            }
        }
        if let Some(t) = self.tp_tail {
            p.tp_tail = t;
        }
        Ok(p)
    }
}

/// `--params` (a preset name or a TOML file of overrides) wins over the
/// config file's `[utility]` table, which wins over the default preset.
pub fn resolve_utility(flag: Option<&str>, config: &ConfigFile) -> Result<UtilityParams, CliError> {
    let params = match (flag, &config.utility) {
        (Some(value), _) => match UtilityParams::preset(value) {
            Some(p) => p,
            None => {
                let path = Path::new(value);
                if !path.is_file() {
                    return Err(CliError::Usage(format!(
                        "`{value}` is neither a utility preset nor a readable file"
                    )));
                }
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {value}: {e}")))?;
                let section: UtilitySection = toml::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("bad utility file {value}: {e}")))?;
                section.resolve()?
            }
        },
        (None, Some(section)) => section.resolve()?,
        (None, None) => UtilityParams::challenge_2019_default(),
    };
    params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(params)
}

/// Record of one run: enough to repeat it and check the inputs are unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Fully resolved settings after flags, config file and presets.
    pub config: BTreeMap<String, serde_json::Value>,
    /// Input name → SHA-256 over its files.
    pub inputs: BTreeMap<String, String>,
    pub seed: Option<u64>,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            config: BTreeMap::new(),
            inputs: BTreeMap::new(),
            seed: None,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("plain data serializes");
        self.config.insert(key.to_string(), value);
    }

    pub fn input(&mut self, name: &str, path: &Path) -> Result<(), CliError> {
        self.inputs.insert(name.to_string(), digest_path(path)?);
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

fn collect_files(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            collect_files(&p, out)?;
        } else {
            out.push(p);
        }
    }
    Ok(())
}

/// SHA-256 of a file, or of the sorted `relative-path\0file-digest` lines of
/// every file under a directory.
pub fn digest_path(path: &Path) -> Result<String, CliError> {
    let io_err = |e: std::io::Error| CliError::Data(format!("{}: {e}", path.display()));
    if path.is_file() {
        let bytes = fs::read(path).map_err(io_err)?;
        return Ok(hex::encode(Sha256::digest(&bytes)));
    }
    let mut files = Vec::new();
    collect_files(path, &mut files).map_err(io_err)?;
    let mut hasher = Sha256::new();
    for f in files {
        let rel = f
            .strip_prefix(path)
            .unwrap_or(&f)
            .to_string_lossy()
            .replace('\\', "/");
        let bytes = fs::read(&f).map_err(io_err)?;
        hasher.update(rel.as_bytes());
        hasher.update([0u8]);
        hasher.update(hex::encode(Sha256::digest(&bytes)).as_bytes());
        hasher.update(b"\n");
    }
    Ok(hex::encode(hasher.finalize()))
}
