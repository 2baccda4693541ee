//! Command line surface and configuration resolution.
//!
//! Precedence is flags over a single optional TOML config file over
//! built-in defaults; no environment variables are consulted, so a run
//! is fully described by its command line plus the named file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use plcsnet::{Preference, Tail, UdVariant};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "plcsnet",
    version,
    about = "Classify pairwise time-series correlations by power-law fit of the cumulative \
             Manhattan distance and condense them into percolation-threshold networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify every pair of the panel: strength/stability/distance
    /// matrices plus per-pair fit diagnostics
    Analyze(CommonArgs),
    /// Build the network on the percolation threshold for each requested
    /// preference order
    Npt(CommonArgs),
    /// Minimum spanning tree baseline on the distance channel
    Mst(CommonArgs),
    /// Synthetic recovery fixtures and the noise robustness report
    Synth(CommonArgs),
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Analyze(a) | Command::Npt(a) | Command::Mst(a) | Command::Synth(a) => a,
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Optional TOML config file supplying defaults; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Input panel: wide CSV, header of entity codes, first column the period
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Analysis window START:END (inclusive); defaults to the full panel
    #[arg(long)]
    pub window: Option<String>,

    /// Log-log points entering each fit: a count (>= 3) or "all"
    #[arg(long)]
    pub tail: Option<String>,

    /// Ultrametric distance normalization
    #[arg(long = "ud-variant", value_parser = ["am", "ms"])]
    pub ud_variant: Option<String>,

    /// Preference orders, comma separated: cp, sp, s, ud
    #[arg(long, value_delimiter = ',')]
    pub preference: Option<Vec<String>>,

    /// Output formats, comma separated:
    /// matrix-csv, pairs-json, loglog-csv, dot, graphml
    #[arg(long, value_delimiter = ',')]
    pub formats: Option<Vec<String>>,

    /// Output directory (created if absent)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Base seed for synthetic generation
    #[arg(long)]
    pub seed: Option<u64>,

    /// Trials per noise level of the robustness experiment
    #[arg(long)]
    pub trials: Option<usize>,

    /// Length of synthetic series
    #[arg(long)]
    pub len: Option<usize>,

    /// Gap scale of synthetic pairs
    #[arg(long)]
    pub scale: Option<f64>,

    /// Noise levels for the robustness experiment, comma separated,
    /// increasing; defaults to fractions of the base series range
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
}

/// The subset of settings a config file may provide.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: Option<PathBuf>,
    window: Option<String>,
    tail: Option<String>,
    ud_variant: Option<String>,
    preference: Option<Vec<String>>,
    formats: Option<Vec<String>>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    trials: Option<usize>,
    len: Option<usize>,
    scale: Option<f64>,
    sigmas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputFormat {
    MatrixCsv,
    PairsJson,
    LoglogCsv,
    Dot,
    Graphml,
}

impl OutputFormat {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "matrix-csv" => Ok(OutputFormat::MatrixCsv),
            "pairs-json" => Ok(OutputFormat::PairsJson),
            "loglog-csv" => Ok(OutputFormat::LoglogCsv),
            "dot" => Ok(OutputFormat::Dot),
            "graphml" => Ok(OutputFormat::Graphml),
            other => Err(CliError::Usage(format!(
                "unknown format {other:?}; expected matrix-csv, pairs-json, loglog-csv, dot or graphml"
            ))),
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    /// Inclusive period window; `None` means the full panel range.
    pub window: Option<(i64, i64)>,
    pub tail: Tail,
    pub ud_variant: UdVariant,
    pub preferences: Vec<Preference>,
    pub formats: BTreeSet<OutputFormat>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub trials: usize,
    pub len: usize,
    pub scale: f64,
    pub sigmas: Vec<f64>,
}

fn parse_window(s: &str) -> Result<(i64, i64), CliError> {
    let (a, b) = s.split_once(':').ok_or_else(|| {
        CliError::Usage(format!("window {s:?} must look like START:END"))
    })?;
    let start = a
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid window start {a:?}")))?;
    let end = b
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid window end {b:?}")))?;
    Ok((start, end))
}

fn parse_tail(s: &str) -> Result<Tail, CliError> {
    if s == "all" {
        return Ok(Tail::All);
    }
    let n: usize = s
        .parse()
        .map_err(|_| CliError::Usage(format!("tail must be a count or \"all\", got {s:?}")))?;
    if n < 3 {
        return Err(CliError::Usage(format!("tail of {n} points, need at least 3")));
    }
    Ok(Tail::Points(n))
}

fn parse_preference(s: &str) -> Result<Preference, CliError> {
    match s {
        "cp" => Ok(Preference::Convergent),
        "sp" => Ok(Preference::Strength),
        "s" => Ok(Preference::Stability),
        "ud" => Ok(Preference::SmallDistance),
        other => Err(CliError::Usage(format!(
            "unknown preference {other:?}; expected cp, sp, s or ud"
        ))),
    }
}

fn load_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

impl CommonArgs {
    /// Merge flags over the optional config file over defaults.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => load_file_config(path)?,
            None => FileConfig::default(),
        };

        let window = match self.window.as_deref().or(file.window.as_deref()) {
            Some(s) => Some(parse_window(s)?),
            None => None,
        };
        let tail = match self.tail.as_deref().or(file.tail.as_deref()) {
            Some(s) => parse_tail(s)?,
            None => Tail::Points(10),
        };
        let ud_variant = match self.ud_variant.as_deref().or(file.ud_variant.as_deref()) {
            Some("ms") => UdVariant::Ms,
            Some("am") | None => UdVariant::Am,
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "unknown ud variant {other:?}; expected am or ms"
                )))
            }
        };
        let preferences = match self.preference.as_ref().or(file.preference.as_ref()) {
            Some(list) => {
                let mut prefs = Vec::new();
                for s in list {
                    let p = parse_preference(s)?;
                    if !prefs.contains(&p) {
                        prefs.push(p);
                    }
                }
                if prefs.is_empty() {
                    return Err(CliError::Usage("no preference given".into()));
                }
                prefs
            }
            None => vec![
                Preference::Convergent,
                Preference::Strength,
                Preference::Stability,
                Preference::SmallDistance,
            ],
        };
        let formats = match self.formats.as_ref().or(file.formats.as_ref()) {
            Some(list) => {
                let mut set = BTreeSet::new();
                for s in list {
                    set.insert(OutputFormat::parse(s)?);
                }
                if set.is_empty() {
                    return Err(CliError::Usage("no output format given".into()));
                }
                set
            }
            None => BTreeSet::from([
                OutputFormat::MatrixCsv,
                OutputFormat::PairsJson,
                OutputFormat::Dot,
                OutputFormat::Graphml,
            ]),
        };

        let len = self.len.or(file.len).unwrap_or(200);
        if len < 4 {
            return Err(CliError::Usage(format!("len {len} below minimum 4")));
        }
        let sigmas = match self.sigmas.as_ref().or(file.sigmas.as_ref()) {
            Some(s) => s.clone(),
            None => {
                let range = (len - 1) as f64;
                vec![0.0, 0.01 * range, 0.025 * range, 0.05 * range, 0.10 * range]
            }
        };

        Ok(RunConfig {
            input: self.input.clone().or(file.input),
            window,
            tail,
            ud_variant,
            preferences,
            formats,
            out_dir: self
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("out")),
            seed: self.seed.or(file.seed).unwrap_or(42),
            trials: self.trials.or(file.trials).unwrap_or(100),
            len,
            scale: self.scale.or(file.scale).unwrap_or(1.0),
            sigmas,
        })
    }
}

impl RunConfig {
    pub fn input_path(&self) -> Result<&Path, CliError> {
        self.input
            .as_deref()
            .ok_or_else(|| CliError::Usage("--input is required for this command".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_without_flags() {
        let cfg = CommonArgs::default().resolve().unwrap();
        assert_eq!(cfg.tail, Tail::Points(10));
        assert_eq!(cfg.ud_variant, UdVariant::Am);
        assert_eq!(cfg.preferences.len(), 4);
        assert_eq!(cfg.trials, 100);
        assert_eq!(cfg.sigmas.len(), 5);
        assert_eq!(cfg.sigmas[0], 0.0);
    }

    #[test]
    fn window_parsing() {
        assert_eq!(parse_window("2002:2011").unwrap(), (2002, 2011));
        assert!(parse_window("2002-2011").is_err());
        assert!(parse_window("a:b").is_err());
    }

    #[test]
    fn tail_parsing() {
        assert_eq!(parse_tail("all").unwrap(), Tail::All);
        assert_eq!(parse_tail("15").unwrap(), Tail::Points(15));
        assert!(parse_tail("2").is_err());
        assert!(parse_tail("ten").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "tail = \"15\"\nseed = 7\nout = \"from-file\"\n").unwrap();
        let args = CommonArgs {
            config: Some(path),
            tail: Some("20".into()),
            ..CommonArgs::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.tail, Tail::Points(20)); // flag wins
        assert_eq!(cfg.seed, 7); // file fills the gap
        assert_eq!(cfg.out_dir, PathBuf::from("from-file"));
    }

    #[test]
    fn unknown_config_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "taill = \"15\"\n").unwrap();
        let args = CommonArgs {
            config: Some(path),
            ..CommonArgs::default()
        };
        assert!(matches!(args.resolve(), Err(CliError::Usage(_))));
    }

    #[test]
    fn preference_list_deduplicated_in_order() {
        let args = CommonArgs {
            preference: Some(vec!["sp".into(), "cp".into(), "sp".into()]),
            ..CommonArgs::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(
            cfg.preferences,
            vec![Preference::Strength, Preference::Convergent]
        );
    }
}
