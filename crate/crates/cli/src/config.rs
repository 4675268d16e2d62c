//! Flat `key=value` run configuration.
//!
//! Values are layered: built-in defaults, then a named preset, then a config
//! file, then command-line flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hinev_core::presets::{self, preset};
use hinev_core::synth::Template;
use hinev_core::TrainConfig;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub input: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub out: PathBuf,
    /// Synthetic template used when no input is given.
    pub synth: Option<String>,
    pub synth_seed: u64,
    pub anchor: String,
    pub dedup: bool,
    pub train: TrainConfig,
    pub train_ratio: f64,
    pub negative_ratio: f64,
    pub train_fraction: f64,
    pub runs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            preset: None,
            input: None,
            schema: None,
            labels: None,
            out: PathBuf::from("out"),
            synth: None,
            synth_seed: 0,
            anchor: "paper".to_string(),
            dedup: false,
            train: TrainConfig::default(),
            train_ratio: 0.8,
            negative_ratio: 1.0,
            train_fraction: 0.8,
            runs: 1,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid value `{value}` for `{key}`")))
}

impl RunConfig {
    pub fn apply_preset(&mut self, name: &str) -> Result<(), CliError> {
        let p = preset(name).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown preset `{name}` (available: {})",
                presets::NAMES.join(", ")
            ))
        })?;
        self.preset = Some(name.to_string());
        self.anchor = p.anchor.to_string();
        self.train = p.train;
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let path = || Some(PathBuf::from(value));
        match key {
            "preset" => self.apply_preset(value)?,
            "input" => self.input = path(),
            "schema" => self.schema = path(),
            "labels" => self.labels = path(),
            "out" => self.out = PathBuf::from(value),
            "synth" => {
                value.parse::<Template>().map_err(CliError::Usage)?;
                self.synth = Some(value.to_string());
            }
            "synth_seed" => self.synth_seed = parse(key, value)?,
            "anchor" => self.anchor = value.to_string(),
            "dedup" => self.dedup = parse(key, value)?,
            "dim" => self.train.dim = parse(key, value)?,
            "beta" => self.train.beta = parse(key, value)?,
            "alpha" => self.train.alpha = parse(key, value)?,
            "learning_rate" => self.train.learning_rate = parse(key, value)?,
            "epochs" => self.train.epochs = parse(key, value)?,
            "batch_size" => self.train.batch_size = parse(key, value)?,
            "seed" => self.train.seed = parse(key, value)?,
            "depth" => self.train.depth = parse(key, value)?,
            "min_rel_improvement" => {
                self.train.min_rel_improvement = match value {
                    "none" | "" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "train_ratio" => self.train_ratio = parse(key, value)?,
            "negative_ratio" => self.negative_ratio = parse(key, value)?,
            "train_fraction" => self.train_fraction = parse(key, value)?,
            "runs" => self.runs = parse(key, value)?,
            other => return Err(CliError::Usage(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a config file. A `preset` line is applied first, so the rest
    /// of the file overrides it regardless of order; with `use_preset` false
    /// the line is ignored.
    pub fn load_file(&mut self, path: &Path, use_preset: bool) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("{}:{}: expected key=value", path.display(), i + 1))
            })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        if let Some((_, v)) = pairs.iter().find(|(k, _)| k == "preset" && use_preset) {
            self.apply_preset(v)?;
        }
        for (k, v) in pairs.iter().filter(|(k, _)| k != "preset") {
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Resolved configuration in the format `load_file` reads.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k}={v}").expect("write to string");
        if let Some(p) = &self.preset {
            kv("preset", p.clone());
        }
        for (k, p) in [
            ("input", &self.input),
            ("schema", &self.schema),
            ("labels", &self.labels),
        ] {
            if let Some(p) = p {
                kv(k, p.display().to_string());
            }
        }
        kv("out", self.out.display().to_string());
        if let Some(t) = &self.synth {
            kv("synth", t.clone());
            kv("synth_seed", self.synth_seed.to_string());
        }
        kv("anchor", self.anchor.clone());
        kv("dedup", self.dedup.to_string());
        let t = &self.train;
        kv("dim", t.dim.to_string());
        kv("beta", t.beta.to_string());
        kv("alpha", t.alpha.to_string());
        kv("learning_rate", t.learning_rate.to_string());
        kv("epochs", t.epochs.to_string());
        kv("batch_size", t.batch_size.to_string());
        kv("seed", t.seed.to_string());
        kv("depth", t.depth.to_string());
        kv(
            "min_rel_improvement",
            t.min_rel_improvement
                .map_or("none".to_string(), |v| v.to_string()),
        );
        kv("train_ratio", self.train_ratio.to_string());
        kv("negative_ratio", self.negative_ratio.to_string());
        kv("train_fraction", self.train_fraction.to_string());
        kv("runs", self.runs.to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_then_overrides() {
        let mut c = RunConfig::default();
        c.apply_preset("dblp").unwrap();
        assert_eq!(c.train.beta, 30.0);
        c.set("beta", "5").unwrap();
        assert_eq!(c.train.beta, 5.0);
        assert_eq!(c.train.dim, 64);
    }

    #[test]
    fn render_round_trips() {
        let mut c = RunConfig::default();
        c.apply_preset("toy").unwrap();
        c.set("synth", "fig3a").unwrap();
        c.set("labels", "l.tsv").unwrap();
        c.set("min_rel_improvement", "0.01").unwrap();
        let dir = std::env::temp_dir().join(format!("hinev-config-{}", std::process::id()));
        std::fs::write(&dir, c.render()).unwrap();
        let mut back = RunConfig::default();
        back.load_file(&dir, true).unwrap();
        std::fs::remove_file(&dir).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn bad_keys_and_values() {
        let mut c = RunConfig::default();
        assert!(matches!(c.set("colour", "red"), Err(CliError::Usage(_))));
        assert!(matches!(c.set("dim", "many"), Err(CliError::Usage(_))));
        assert!(matches!(c.set("synth", "fig9"), Err(CliError::Usage(_))));
        assert!(matches!(c.set("preset", "cora"), Err(CliError::Usage(_))));
    }
}
