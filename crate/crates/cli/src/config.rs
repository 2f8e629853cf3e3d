use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Series,
    Certify,
    Fig1,
    Harness,
    Constants,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Series => "series",
            Command::Certify => "certify",
            Command::Fig1 => "fig1",
            Command::Harness => "harness",
            Command::Constants => "constants",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

/// Parses `csv,json,svg` style lists; duplicates collapse.
pub fn parse_formats(s: &str) -> Result<Vec<Format>> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let f = match item.trim() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            "svg" => Format::Svg,
            other => return Err(CliError::Usage(format!("unknown format '{other}'"))),
        };
        out.push(f);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Which family flavors a harness run covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlavorChoice {
    Scalar,
    Vector,
    Both,
}

impl FromStr for FlavorChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scalar" => Ok(FlavorChoice::Scalar),
            "vector" => Ok(FlavorChoice::Vector),
            "both" => Ok(FlavorChoice::Both),
            _ => Err(CliError::Usage(format!("unknown flavor '{s}' (scalar, vector or both)"))),
        }
    }
}

/// Everything that determines a run's output. Output directory and worker
/// count are left out of the hash.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub p: Vec<f64>,
    pub m: Vec<f64>,
    pub q: Vec<f64>,
    pub n: Vec<usize>,
    pub m_cap: f64,
    pub tol: f64,
    pub seed: u64,
    pub flavor: FlavorChoice,
    pub formats: Vec<Format>,
    #[serde(skip)]
    pub output_dir: PathBuf,
    #[serde(skip)]
    pub jobs: Option<usize>,
}

impl RunConfig {
    /// Defaults for `command`, before any flags are applied.
    pub fn defaults(command: Command) -> Self {
        let (p, m) = match command {
            Command::Certify => ((1..=40).map(|i| 1.0 + 9.0 * i as f64 / 40.0).collect(), vec![]),
            Command::Harness => (vec![1.0, 2.0, 3.0, 4.0], vec![0.5, 1.0, 2.0, 5.0]),
            _ => (vec![1.1, 1.5, 2.0, 3.0, 5.0, 10.0], (0..=50).map(|i| 2.0 * i as f64).collect()),
        };
        let formats = match command {
            Command::Fig1 => vec![Format::Csv, Format::Svg],
            _ => vec![Format::Csv, Format::Json],
        };
        RunConfig {
            command,
            p,
            m,
            q: vec![2.0, 4.0, 6.0, 10.0],
            n: vec![1, 3, 8, 16],
            m_cap: 20.0,
            tol: 1e-9,
            seed: 0,
            flavor: FlavorChoice::Both,
            formats,
            output_dir: PathBuf::from("."),
            jobs: None,
        }
    }

    /// Rejects empty grids and values outside each command's domain.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("--tol must lie in (0, 1), got {}", self.tol));
        }
        if self.formats.is_empty() {
            return bad("--formats is empty".into());
        }
        if self.jobs == Some(0) {
            return bad("--jobs must be at least 1".into());
        }
        match self.command {
            Command::Series => {
                self.nonempty("p", self.p.len())?;
                self.nonempty("m", self.m.len())?;
                if let Some(p) = self.p.iter().find(|p| **p <= 1.0) {
                    return bad(format!("series needs p > 1, got {p}"));
                }
                self.nonnegative_m()?;
            }
            Command::Certify => {
                self.nonempty("p", self.p.len())?;
                if let Some(p) = self.p.iter().find(|p| **p <= 1.0) {
                    return bad(format!("certify needs p > 1, got {p}"));
                }
                if !(self.m_cap > 0.0 && self.m_cap.is_finite()) {
                    return bad(format!("--m-cap must be positive, got {}", self.m_cap));
                }
            }
            Command::Harness => {
                self.nonempty("p", self.p.len())?;
                self.nonempty("m", self.m.len())?;
                self.nonempty("n", self.n.len())?;
                self.nonempty("q", self.q.len())?;
                if let Some(p) = self.p.iter().find(|p| **p < 1.0) {
                    return bad(format!("harness needs p >= 1, got {p}"));
                }
                if let Some(m) = self.m.iter().find(|m| **m <= 0.0) {
                    return bad(format!("harness needs m > 0, got {m}"));
                }
                if self.n.contains(&0) {
                    return bad("family sizes must be at least 1".into());
                }
                self.q_domain()?;
            }
            Command::Constants => {
                self.nonempty("q", self.q.len())?;
                self.q_domain()?;
            }
            Command::Fig1 => {}
        }
        Ok(())
    }

    fn nonempty(&self, name: &str, len: usize) -> Result<()> {
        if len == 0 {
            return Err(CliError::Usage(format!("--{name} grid is empty")));
        }
        Ok(())
    }

    fn nonnegative_m(&self) -> Result<()> {
        match self.m.iter().find(|m| **m < 0.0) {
            Some(m) => Err(CliError::Usage(format!("m must be non-negative, got {m}"))),
            None => Ok(()),
        }
    }

    fn q_domain(&self) -> Result<()> {
        match self.q.iter().find(|q| **q < 2.0) {
            Some(q) => Err(CliError::Usage(format!("q must be at least 2, got {q}"))),
            None => Ok(()),
        }
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
