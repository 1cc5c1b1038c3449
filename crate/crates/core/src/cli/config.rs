//! Run configuration: defaults, a `key = value` file, the seed environment
//! variable and command-line flags, in increasing precedence.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::montecarlo::{ResultDocument, MAX_SAMPLES};

/// Environment variable consulted when no seed is given otherwise.
pub const SEED_ENV: &str = "HEAVYTAIL_SEED";

/// Smallest sample count accepted by statistical commands.
pub const MIN_SAMPLES: usize = 1_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: usize,
    pub confidence: f64,
    pub grid_points: usize,
    pub output_dir: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            samples: 1_000_000,
            confidence: 0.99,
            grid_points: 512,
            output_dir: None,
            format: OutputFormat::Csv,
        }
    }
}

/// Values set explicitly by one configuration source.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub confidence: Option<f64>,
    pub grid_points: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl Overrides {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_file_text(text: &str) -> Result<Self> {
        let mut o = Overrides::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("config line {}: expected 'key = value'", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "seed" => o.seed = Some(parse_seed(v)?),
                "samples" => o.samples = Some(parse_samples(v)?),
                "confidence" => o.confidence = Some(parse_f64(k, v)?),
                "grid_points" => o.grid_points = Some(parse_count(k, v)?),
                "output_dir" => o.output_dir = Some(PathBuf::from(v)),
                "format" => o.format = Some(parse_format(v)?),
                _ => return Err(Error::Config(format!("config line {}: unknown key '{k}'", no + 1))),
            }
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse_file_text(&text)
    }
}

impl RunConfig {
    /// Merges `file`, then the seed variable, then `flags` onto the defaults.
    pub fn resolve(file: Option<Overrides>, env_seed: Option<&str>, flags: Overrides) -> Result<Self> {
        let mut c = RunConfig::default();
        let file = file.unwrap_or_default();
        let env_seed = match env_seed {
            Some(s) => Some(parse_seed(s).map_err(|e| Error::Config(format!("{SEED_ENV}: {e}")))?),
            None => None,
        };
        c.seed = flags.seed.or(file.seed).or(env_seed).unwrap_or(c.seed);
        c.samples = flags.samples.or(file.samples).unwrap_or(c.samples);
        c.confidence = flags.confidence.or(file.confidence).unwrap_or(c.confidence);
        c.grid_points = flags.grid_points.or(file.grid_points).unwrap_or(c.grid_points);
        c.output_dir = flags.output_dir.or(file.output_dir);
        c.format = flags.format.or(file.format).unwrap_or(c.format);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.confidence > 0.5 && self.confidence < 1.0) {
            return Err(Error::Config(format!("confidence {} must lie in (0.5, 1)", self.confidence)));
        }
        if self.grid_points < 2 {
            return Err(Error::Config("grid_points must be at least 2".into()));
        }
        if self.samples > MAX_SAMPLES {
            return Err(Error::Config(format!("{} samples exceed the cap of {MAX_SAMPLES}", self.samples)));
        }
        Ok(())
    }

    /// Extra check for commands that draw samples.
    pub fn require_statistical(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::Config(format!(
                "{} samples is below the minimum of {MIN_SAMPLES} for statistical commands",
                self.samples
            )));
        }
        Ok(())
    }

    /// A result document carrying the anchor, the resolved configuration and
    /// the command line.
    pub fn document(&self, anchor: &str, command_line: &str) -> ResultDocument {
        let mut d = ResultDocument::new(anchor);
        d.push("command_line", command_line);
        d.push("config.seed", self.seed);
        d.push("config.samples", self.samples);
        d.push("config.confidence", self.confidence);
        d.push("config.grid_points", self.grid_points);
        d.push("config.output_dir", self.output_dir.as_ref().map_or("-".into(), |p| p.display().to_string()));
        d.push("config.format", "csv");
        d
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse().map_err(|_| Error::Config(format!("{key}: '{v}' is not a number")))
}

fn parse_count(key: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| Error::Config(format!("{key}: '{v}' is not a count")))
}

pub fn parse_seed(v: &str) -> Result<u64> {
    v.trim().parse().map_err(|_| Error::Config(format!("seed '{v}' is not a 64-bit unsigned integer")))
}

/// Sample counts: plain integers or scientific notation such as `1e6`.
pub fn parse_samples(v: &str) -> Result<usize> {
    let v = v.trim();
    if let Ok(n) = v.parse::<usize>() {
        return Ok(n);
    }
    let x: f64 = v.parse().map_err(|_| Error::Config(format!("samples '{v}' is not a count")))?;
    if !(x >= 1.0 && x.fract() == 0.0 && x <= usize::MAX as f64) {
        return Err(Error::Config(format!("samples '{v}' is not a positive whole number")));
    }
    Ok(x as usize)
}

pub fn parse_format(v: &str) -> Result<OutputFormat> {
    match v.trim() {
        "csv" => Ok(OutputFormat::Csv),
        other => Err(Error::Config(format!("unsupported output format '{other}'; only csv is produced"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_accept_scientific_notation() {
        assert_eq!(parse_samples("1e6").unwrap(), 1_000_000);
        assert_eq!(parse_samples("2500").unwrap(), 2500);
        assert!(parse_samples("1.5").is_err());
        assert!(parse_samples("-3").is_err());
        assert!(parse_samples("abc").is_err());
    }

    #[test]
    fn precedence_flag_file_env_default() {
        let file = Overrides::parse_file_text("seed = 5\nsamples = 1e4 # comment\nconfidence=0.95\n").unwrap();
        let c = RunConfig::resolve(Some(file.clone()), Some("9"), Overrides::default()).unwrap();
        assert_eq!((c.seed, c.samples, c.confidence), (5, 10_000, 0.95));
        let flags = Overrides { seed: Some(1), ..Default::default() };
        assert_eq!(RunConfig::resolve(Some(file), Some("9"), flags).unwrap().seed, 1);
        assert_eq!(RunConfig::resolve(None, Some("9"), Overrides::default()).unwrap().seed, 9);
        assert_eq!(RunConfig::resolve(None, None, Overrides::default()).unwrap().seed, 0);
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(Overrides::parse_file_text("colour = red").is_err());
        assert!(Overrides::parse_file_text("seed").is_err());
        let bad = Overrides { confidence: Some(0.4), ..Default::default() };
        assert!(RunConfig::resolve(None, None, bad).is_err());
        assert!(RunConfig::resolve(None, Some("x"), Overrides::default()).is_err());
        let small = RunConfig { samples: 999, ..Default::default() };
        assert!(small.require_statistical().is_err());
        assert!(parse_format("json-lines").is_err());
    }

    #[test]
    fn document_embeds_config() {
        let d = RunConfig::default().document("compare", "heavytail compare");
        assert_eq!(d.get("anchor"), Some("compare"));
        assert_eq!(d.get("config.seed"), Some("0"));
        assert!(d.get("tool_version").is_some());
    }
}
