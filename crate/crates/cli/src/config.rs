//! Run settings from a `key = value` file and command-line flags.
//!
//! Every key is optional at this layer; commands fill in their own defaults.
//! A flag always wins over the same key in the file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dualphase::GridSize;

use crate::error::{CliError, Result};

/// Iris radius: derived from the cell size, or fixed in cycles per SLM pixel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Cutoff {
    #[default]
    Auto,
    Fixed(f64),
}

impl FromStr for Cutoff {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Cutoff::Auto);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| format!("cutoff must be a number or `auto`, got `{s}`"))?;
        if v.is_finite() && v > 0.0 {
            Ok(Cutoff::Fixed(v))
        } else {
            Err(format!("cutoff must be positive, got {v}"))
        }
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::Auto => f.write_str("auto"),
            Cutoff::Fixed(v) => write!(f, "{v}"),
        }
    }
}

/// Parses `WxH`, e.g. `512x512`.
pub fn parse_size(s: &str) -> std::result::Result<GridSize, String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("size must look like WIDTHxHEIGHT, got `{s}`"))?;
    let dim = |t: &str| -> std::result::Result<usize, String> {
        match t.trim().parse() {
            Ok(v) if v >= 2 => Ok(v),
            _ => Err(format!("size dimension `{t}` must be an integer >= 2")),
        }
    };
    Ok(GridSize::new(dim(w)?, dim(h)?))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Settings {
    pub size: Option<GridSize>,
    pub cell: Option<usize>,
    pub eta: Option<f64>,
    pub upsample: Option<usize>,
    pub cutoff: Option<Cutoff>,
    pub blazed_period: Option<usize>,
    pub betas: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl Settings {
    /// Take every key set in `over`, keep the rest from `self`.
    pub fn overridden_by(self, over: Settings) -> Settings {
        Settings {
            size: over.size.or(self.size),
            cell: over.cell.or(self.cell),
            eta: over.eta.or(self.eta),
            upsample: over.upsample.or(self.upsample),
            cutoff: over.cutoff.or(self.cutoff),
            blazed_period: over.blazed_period.or(self.blazed_period),
            betas: over.betas.or(self.betas),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
        }
    }

    pub fn from_file(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Settings::parse(&text).map_err(|msg| CliError::Config(format!("{}: {msg}", path.display())))
    }

    pub fn parse(text: &str) -> std::result::Result<Settings, String> {
        let mut s = Settings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", n + 1))?;
            let (key, value) = (key.trim().replace('-', "_"), value.trim());
            let bad = |e: String| format!("line {}: {key}: {e}", n + 1);
            match key.as_str() {
                "size" => s.size = Some(parse_size(value).map_err(bad)?),
                "cell" => s.cell = Some(number(value).map_err(bad)?),
                "eta" => s.eta = Some(number(value).map_err(bad)?),
                "upsample" => s.upsample = Some(number(value).map_err(bad)?),
                "cutoff" => s.cutoff = Some(value.parse().map_err(bad)?),
                "blazed_period" => s.blazed_period = Some(number(value).map_err(bad)?),
                "betas" => s.betas = Some(number(value).map_err(bad)?),
                "seed" => s.seed = Some(number(value).map_err(bad)?),
                "out" | "output_dir" => s.out = Some(PathBuf::from(value)),
                _ => return Err(format!("line {}: unknown key `{key}`", n + 1)),
            }
        }
        Ok(s)
    }
}

fn number<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("`{s}` is not a valid number"))
}
