use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_formats, Command, RunConfig};
use crate::error::Result;
use crate::grid::{parse_grid, parse_int_grid};

#[derive(Debug, Parser)]
#[command(name = "sphere-ineq", version, about = "Certified series sweeps and inequality checks on the 2-sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Sub {
    /// Enclose I_p(m) and J_p(m) on a (p, m) grid
    Series,
    /// Grid certificate that I_p(m) < 1
    Certify,
    /// The curve m1(p) - m0(p) on [2, 2.5] and its root
    Fig1,
    /// Family, interpolation and trace checks
    Harness,
    /// Interpolation constants side by side
    Constants,
}

/// Grids accept `start:stop:step` (inclusive) and comma lists.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    #[arg(long = "p", global = true, value_name = "GRID")]
    pub p: Option<String>,
    #[arg(long = "m", global = true, value_name = "GRID")]
    pub m: Option<String>,
    #[arg(long = "q", global = true, value_name = "GRID")]
    pub q: Option<String>,
    /// Family sizes
    #[arg(long = "n", global = true, value_name = "GRID")]
    pub n: Option<String>,
    /// Upper end of the certify m range
    #[arg(long, global = true)]
    pub m_cap: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Comma list of csv, json, svg
    #[arg(long, global = true)]
    pub formats: Option<String>,
    #[arg(long, global = true, env = "SPHERE_INEQ_OUT", value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// scalar, vector or both
    #[arg(long, global = true)]
    pub flavor: Option<String>,
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig> {
        let command = match self.command {
            Sub::Series => Command::Series,
            Sub::Certify => Command::Certify,
            Sub::Fig1 => Command::Fig1,
            Sub::Harness => Command::Harness,
            Sub::Constants => Command::Constants,
        };
        let mut cfg = RunConfig::defaults(command);
        let c = self.common;
        if let Some(s) = c.p {
            cfg.p = parse_grid(&s)?;
        }
        if let Some(s) = c.m {
            cfg.m = parse_grid(&s)?;
        }
        if let Some(s) = c.q {
            cfg.q = parse_grid(&s)?;
        }
        if let Some(s) = c.n {
            cfg.n = parse_int_grid(&s)?;
        }
        if let Some(s) = c.formats {
            cfg.formats = parse_formats(&s)?;
        }
        if let Some(s) = c.flavor {
            cfg.flavor = s.parse()?;
        }
        cfg.m_cap = c.m_cap.unwrap_or(cfg.m_cap);
        cfg.tol = c.tol.unwrap_or(cfg.tol);
        cfg.seed = c.seed.unwrap_or(cfg.seed);
        cfg.jobs = c.jobs;
        if let Some(dir) = c.out {
            cfg.output_dir = dir;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
