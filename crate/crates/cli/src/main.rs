//! `tongue-atlas`: command-line access to orbits, tongue boundaries,
//! stability borders, cascades and the orbit census.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 numerical
//! failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{OutputFormat, RunConfig};

/// A command-line or configuration mistake (exit code 2).
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// Options shared by every subcommand.
#[derive(Args, Default)]
struct Common {
    /// JSON config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout if absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true, visible_alias = "output-format")]
    format: Option<OutputFormat>,
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    #[arg(long, global = true)]
    root_tol: Option<f64>,
    #[arg(long, global = true)]
    match_tol: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true)]
    boundary_tol: Option<f64>,
    #[arg(long, global = true)]
    border_tol: Option<f64>,
}

#[derive(Args, Default)]
struct Tongue {
    /// Period
    #[arg(long)]
    p: Option<u32>,
    /// Momentum winding
    #[arg(long)]
    j: Option<i64>,
}

#[derive(Subcommand)]
enum Command {
    /// Forward iterates of a lattice of seeds
    #[command(allow_negative_numbers = true)]
    Portrait {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        n_seeds: Option<usize>,
        #[arg(long)]
        n_iters: Option<usize>,
    },
    /// Periodic orbits of one tongue at one parameter point
    #[command(allow_negative_numbers = true)]
    Orbits {
        #[command(flatten)]
        tongue: Tongue,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        /// Involution case: all, A, B+ or B-
        #[arg(long)]
        case: Option<String>,
        /// Search from seeds on the line J = LINE_J instead
        #[arg(long)]
        line_j: Option<f64>,
    },
    /// First-order tongue edges
    #[command(allow_negative_numbers = true)]
    Edges {
        #[command(flatten)]
        tongue: Tongue,
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Numerically traced tongue boundary
    #[command(allow_negative_numbers = true)]
    Boundary {
        #[command(flatten)]
        tongue: Tongue,
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Period-doubling and coalescence borders over an Ω range
    #[command(allow_negative_numbers = true)]
    Border {
        #[command(flatten)]
        tongue: Tongue,
        #[arg(long)]
        omega_min: Option<f64>,
        #[arg(long)]
        omega_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Period-doubling cascade at fixed Ω
    #[command(allow_negative_numbers = true)]
    Cascade {
        #[command(flatten)]
        tongue: Tongue,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Start from this stable orbit instead of the first one found
        #[arg(long)]
        seed_k: Option<f64>,
        #[arg(long)]
        seed_theta: Option<f64>,
        #[arg(long)]
        seed_j: Option<f64>,
    },
    /// Orbit inventory over a (k, Ω) grid
    #[command(allow_negative_numbers = true)]
    Census {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        k_min: Option<f64>,
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long)]
        n_k: Option<usize>,
        #[arg(long)]
        omega_min: Option<f64>,
        #[arg(long)]
        omega_max: Option<f64>,
        #[arg(long)]
        n_omega: Option<usize>,
        #[arg(long)]
        p_max: Option<u32>,
    },
    /// Gauss sums against their closed-form phases
    Gauss {
        #[arg(long)]
        p_max: Option<u32>,
    },
    /// Parameters of the period-3 resonance past the doubling
    Resonance3,
}

#[derive(Parser)]
#[command(
    name = "tongue-atlas",
    version,
    about = "Periodic orbits and Arnol'd tongues of the kicked accelerator map"
)]
struct Root {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

macro_rules! set {
    ($cfg:ident, $($field:ident),+) => {
        $(if let Some(v) = $field { $cfg.$field = Some(v); })+
    };
}

impl Common {
    fn apply(self, cfg: &mut RunConfig) {
        let Common {
            config: _,
            out,
            format,
            grid_points,
            root_tol,
            match_tol,
            max_iter,
            boundary_tol,
            border_tol,
        } = self;
        if let Some(v) = out {
            cfg.output_path = Some(v);
        }
        if let Some(v) = format {
            cfg.output_format = v;
        }
        if let Some(v) = grid_points {
            cfg.grid_points = v;
        }
        if let Some(v) = root_tol {
            cfg.root_tol = v;
        }
        if let Some(v) = match_tol {
            cfg.match_tol = v;
        }
        if let Some(v) = max_iter {
            cfg.max_iter = v;
        }
        if let Some(v) = boundary_tol {
            cfg.boundary_tol = v;
        }
        if let Some(v) = border_tol {
            cfg.border_tol = v;
        }
    }
}

impl Command {
    fn apply(self, cfg: &mut RunConfig) -> &'static str {
        match self {
            Command::Portrait {
                k,
                omega,
                n_seeds,
                n_iters,
            } => {
                set!(cfg, k, omega, n_seeds, n_iters);
                "portrait"
            }
            Command::Orbits {
                tongue: Tongue { p, j },
                k,
                omega,
                case,
                line_j,
            } => {
                set!(cfg, p, j, k, omega, case, line_j);
                "orbits"
            }
            Command::Edges {
                tongue: Tongue { p, j },
                k_max,
                step,
            } => {
                set!(cfg, p, j, k_max, step);
                "edges"
            }
            Command::Boundary {
                tongue: Tongue { p, j },
                k_max,
                step,
            } => {
                set!(cfg, p, j, k_max, step);
                "boundary"
            }
            Command::Border {
                tongue: Tongue { p, j },
                omega_min,
                omega_max,
                step,
            } => {
                set!(cfg, p, j, omega_min, omega_max, step);
                "border"
            }
            Command::Cascade {
                tongue: Tongue { p, j },
                omega,
                n_max,
                seed_k,
                seed_theta,
                seed_j,
            } => {
                set!(cfg, p, j, omega, n_max, seed_k, seed_theta, seed_j);
                "cascade"
            }
            Command::Census {
                k,
                omega,
                k_min,
                k_max,
                n_k,
                omega_min,
                omega_max,
                n_omega,
                p_max,
            } => {
                set!(cfg, k, omega, k_min, k_max, n_k, omega_min, omega_max, n_omega, p_max);
                "census"
            }
            Command::Gauss { p_max } => {
                set!(cfg, p_max);
                "gauss"
            }
            Command::Resonance3 => "resonance3",
        }
    }
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("TONGUE_ATLAS_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| {
        Usage(format!(
            "TONGUE_ATLAS_THREADS must be a non-negative integer, got {v:?}"
        ))
    })?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn run(root: Root) -> anyhow::Result<()> {
    init_threads()?;
    let mut cfg = match &root.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    root.common.apply(&mut cfg);
    let name = root.command.apply(&mut cfg);
    let report = match name {
        "portrait" => commands::portrait(&cfg)?,
        "orbits" => commands::orbits(&cfg)?,
        "edges" => commands::edges(&cfg)?,
        "boundary" => commands::boundary(&cfg)?,
        "border" => commands::border(&cfg)?,
        "cascade" => commands::cascade(&cfg)?,
        "census" => commands::census_cmd(&cfg)?,
        "gauss" => commands::gauss(&cfg)?,
        _ => commands::resonance3()?,
    };
    output::emit(&report.render(&cfg), cfg.output_path.as_deref())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(core) = cause.downcast_ref::<tongue_atlas_core::Error>() {
            return if core.is_validation() { 2 } else { 3 };
        }
        if cause.is::<Usage>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let root = Root::parse();
    match run(root) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
