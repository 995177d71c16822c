//! Run configuration: command-line flags layered over an optional TOML file,
//! resolved to exact values before any work starts.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

use exactapprox_core::construct::Mode;
use exactapprox_core::surd::{parse_exact, parse_rational};
use exactapprox_core::verify::Sign;
use exactapprox_core::{BigRational, PadFunction, QuadraticSurd};

/// Environment variable overriding the output directory.
pub const OUT_ENV: &str = "EXACTAPPROX_OUT";

pub const DEFAULT_BOUND: u64 = 5000;
pub const DEFAULT_BLOCKS: usize = 3;
pub const DEFAULT_LIMIT: u64 = 1000;
pub const DEFAULT_WIDTH: &str = "1e-30";

/// Every option accepted on the command line or in a config file.
#[derive(Args, Clone, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// TOML file with defaults for any of these options
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Subcommand to run (config files only)
    #[arg(skip)]
    pub command: Option<String>,
    /// Target value: decimal literal, p/q, or surd:P,D,Q for (P + sqrt D)/Q
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Padding function: log, power:a/b, or table:q=v,...
    #[arg(long)]
    pub pad: Option<String>,
    /// one or two
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub blocks: Option<usize>,
    /// Largest denominator scanned by verify
    #[arg(long = "Q", alias = "bound")]
    #[serde(alias = "Q")]
    pub bound: Option<u64>,
    /// plus, minus or none
    #[arg(long)]
    pub sign: Option<String>,
    /// Continued-fraction JSON file
    #[arg(long)]
    pub alpha: Option<PathBuf>,
    /// Certificate JSON file
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    /// Output directory (overridden by EXACTAPPROX_OUT unless given here)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest Markoff number listed by spectrum
    #[arg(long)]
    pub limit: Option<u64>,
    /// json or csv
    #[arg(long)]
    pub format: Option<String>,
    /// Sum-interval width goal for decompose
    #[arg(long)]
    pub width: Option<String>,
    #[arg(long)]
    pub max_block_digits: Option<usize>,
    #[arg(long)]
    pub lookahead: Option<usize>,
    /// Worker threads for verify (default: available parallelism)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Seed for randomized property suites
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Options {
    /// Reads the TOML file named by `--config`, if any.
    pub fn load_file(&self) -> Result<Options> {
        let Some(path) = &self.config else { return Ok(Options::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in config file {}", path.display()))
    }

    pub fn from_toml(text: &str) -> Result<Options> {
        Ok(toml::from_str(text)?)
    }

    /// `self` wins wherever it is set.
    pub fn over(self, base: Options) -> Options {
        Options {
            config: self.config.or(base.config),
            command: self.command.or(base.command),
            gamma: self.gamma.or(base.gamma),
            pad: self.pad.or(base.pad),
            mode: self.mode.or(base.mode),
            blocks: self.blocks.or(base.blocks),
            bound: self.bound.or(base.bound),
            sign: self.sign.or(base.sign),
            alpha: self.alpha.or(base.alpha),
            certificate: self.certificate.or(base.certificate),
            out: self.out.or(base.out),
            limit: self.limit.or(base.limit),
            format: self.format.or(base.format),
            width: self.width.or(base.width),
            max_block_digits: self.max_block_digits.or(base.max_block_digits),
            lookahead: self.lookahead.or(base.lookahead),
            threads: self.threads.or(base.threads),
            seed: self.seed.or(base.seed),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => bail!("unknown format {s:?}; expected json or csv"),
        }
    }
}

/// A fully parsed run.
#[derive(Clone, Debug)]
pub enum RunConfig {
    Decompose {
        gamma: QuadraticSurd,
        width: BigRational,
        out: PathBuf,
    },
    Construct {
        gamma: QuadraticSurd,
        pad: PadFunction,
        mode: Mode,
        blocks: usize,
        max_block_digits: Option<usize>,
        lookahead: Option<usize>,
        out: PathBuf,
    },
    Verify {
        alpha: PathBuf,
        gamma: QuadraticSurd,
        pad: PadFunction,
        sign: Sign,
        bound: u64,
        threads: usize,
        format: Format,
        certificate: Option<PathBuf>,
        out: PathBuf,
    },
    Spectrum {
        limit: u64,
        format: Format,
        out: PathBuf,
    },
    Recheck {
        certificate: PathBuf,
        alpha: PathBuf,
        out: PathBuf,
    },
}

fn gamma_of(o: &Options) -> Result<QuadraticSurd> {
    let g = o.gamma.as_deref().context("--gamma is required")?;
    Ok(parse_exact(g)?)
}

fn pad_of(o: &Options) -> Result<PadFunction> {
    Ok(o.pad.as_deref().unwrap_or("log").parse::<PadFunction>()?)
}

impl RunConfig {
    /// Resolves `command` with flags layered over the config file and the
    /// output directory taken from the flag, then the environment, then
    /// the file.
    pub fn resolve(command: &str, flags: Options, env_out: Option<PathBuf>) -> Result<RunConfig> {
        let file = flags.load_file()?;
        let flag_out = flags.out.clone();
        let o = flags.over(file);
        let out = flag_out.or(env_out).or(o.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
        let format = Format::parse(o.format.as_deref().unwrap_or("json"))?;
        Ok(match command {
            "decompose" => RunConfig::Decompose {
                gamma: gamma_of(&o)?,
                width: parse_rational(o.width.as_deref().unwrap_or(DEFAULT_WIDTH))?,
                out,
            },
            "construct" => RunConfig::Construct {
                gamma: gamma_of(&o)?,
                pad: pad_of(&o)?,
                mode: Mode::from_name(o.mode.as_deref().unwrap_or("one"))?,
                blocks: o.blocks.unwrap_or(DEFAULT_BLOCKS),
                max_block_digits: o.max_block_digits,
                lookahead: o.lookahead,
                out,
            },
            "verify" => RunConfig::Verify {
                alpha: o.alpha.clone().context("--alpha is required")?,
                gamma: gamma_of(&o)?,
                pad: pad_of(&o)?,
                sign: Sign::from_name(o.sign.as_deref().unwrap_or("none"))?,
                bound: o.bound.unwrap_or(DEFAULT_BOUND),
                threads: o
                    .threads
                    .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
                    .max(1),
                format,
                certificate: o.certificate.clone(),
                out,
            },
            "spectrum" => RunConfig::Spectrum { limit: o.limit.unwrap_or(DEFAULT_LIMIT), format, out },
            "recheck" => {
                let certificate = o.certificate.clone().context("--certificate is required")?;
                let alpha = match &o.alpha {
                    Some(a) => a.clone(),
                    None => certificate.with_file_name("alpha.json"),
                };
                RunConfig::Recheck { certificate, alpha, out }
            }
            other => bail!("unknown command {other:?}"),
        })
    }
}
