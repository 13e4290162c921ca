//! `bubble-tower`: batch front end for the tower computations.

mod commands;
mod config;
mod output;

use bubble_tower::acceptance::Profile;
use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{Heights, ManifoldRef, RunConfig};
use output::{Failure, Invocation};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bubble-tower", version, about = "Bubble-tower energy, sweep and curvature computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energy constants of the bubble in dimension N.
    Constants {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[command(flatten)]
        io: Io,
    },
    /// Exact concentration rates and energy exponents.
    Schedule {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        io: Io,
    },
    /// Interaction integral of level ELL over an eps grid.
    SweepInteraction(SweepArgs),
    /// Nonlinear cross-term norm of level ELL over an eps grid.
    SweepError(SweepArgs),
    /// Flat-space energy of the tower against the level-by-level model.
    EnergyCheck {
        #[command(flatten)]
        tower: TowerArgs,
        /// Single eps; ignored when a grid is given.
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        io: Io,
    },
    /// Sequential maximiser of the reduced energy and its Hessian.
    Maximize {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        weyl: WeylSource,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        fd_step: Option<f64>,
        #[command(flatten)]
        io: Io,
    },
    /// Weyl norm at sample points of a catalog manifold.
    Weyl {
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        io: Io,
    },
    /// Isometry and differential checks of a catalog symmetry.
    Symmetry {
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        io: Io,
    },
    /// Runs the numbered acceptance criteria.
    Accept {
        #[arg(long, value_enum)]
        profile: Option<ProfileArg>,
        /// Comma-separated criterion numbers; all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
        #[command(flatten)]
        io: Io,
    },
    /// Prints the manifold catalog as JSON.
    Catalog {
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Io {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here (`-` for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct WeylSource {
    /// |W|^2 at the concentration point.
    #[arg(long)]
    weyl_sq: Option<f64>,
    /// Catalog key; |W|^2 is taken at its fixed point or first sample.
    #[arg(long)]
    manifold: Option<String>,
    #[arg(long)]
    catalog: Option<PathBuf>,
}

#[derive(Args)]
struct TowerArgs {
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated heights, or `auto`.
    #[arg(long, value_parser = Heights::parse)]
    d: Option<Heights>,
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[command(flatten)]
    weyl: WeylSource,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    eps_lo: Option<f64>,
    #[arg(long)]
    eps_hi: Option<f64>,
    #[arg(long)]
    per_decade: Option<usize>,
    #[arg(long, value_enum)]
    profile: Option<ProfileArg>,
    /// Write per-point values here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    tower: TowerArgs,
    #[arg(long)]
    ell: Option<usize>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    io: Io,
}

#[derive(Args)]
struct Sampling {
    #[arg(long)]
    manifold: Option<String>,
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fd_step: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Quick,
    Full,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Quick => Profile::Quick,
            ProfileArg::Full => Profile::Full,
        }
    }
}

fn key(m: Option<String>) -> Option<ManifoldRef> {
    m.map(ManifoldRef::Key)
}

impl TowerArgs {
    fn apply(self, c: &mut RunConfig) {
        c.dim = self.dim;
        c.k = self.k;
        c.d = self.d;
        c.r0 = self.r0;
        c.rel_tol = self.rel_tol;
        self.weyl.apply(c);
    }
}

impl WeylSource {
    fn apply(self, c: &mut RunConfig) {
        c.weyl_sq = self.weyl_sq;
        c.manifold = key(self.manifold);
        c.catalog = self.catalog;
    }
}

impl GridArgs {
    fn apply(self, c: &mut RunConfig) -> Option<PathBuf> {
        c.eps_lo = self.eps_lo;
        c.eps_hi = self.eps_hi;
        c.per_decade = self.per_decade;
        c.profile = self.profile.map(Into::into);
        self.csv
    }
}

impl Sampling {
    fn apply(self, c: &mut RunConfig) {
        c.manifold = key(self.manifold);
        c.catalog = self.catalog;
        c.samples = self.samples;
        c.seed = self.seed;
        c.fd_step = self.fd_step;
        c.tol = self.tol;
    }
}

/// Splits the parsed command into its name, flag-level config and I/O paths.
fn flags(cmd: Command) -> (Invocation, RunConfig) {
    let mut c = RunConfig::default();
    let mut csv = None;
    let (name, io, only) = match cmd {
        Command::Constants { dim, rel_tol, io } => {
            c.dim = dim;
            c.rel_tol = rel_tol;
            ("constants", Some(io), vec![])
        }
        Command::Schedule { dim, k, io } => {
            c.dim = dim;
            c.k = k;
            ("schedule", Some(io), vec![])
        }
        Command::SweepInteraction(a) => {
            let io = sweep_flags(a, &mut c, &mut csv);
            ("sweep-interaction", Some(io), vec![])
        }
        Command::SweepError(a) => {
            let io = sweep_flags(a, &mut c, &mut csv);
            ("sweep-error", Some(io), vec![])
        }
        Command::EnergyCheck { tower, eps, grid, io } => {
            tower.apply(&mut c);
            c.eps = eps;
            csv = grid.apply(&mut c);
            ("energy-check", Some(io), vec![])
        }
        Command::Maximize { dim, k, weyl, eps, fd_step, io } => {
            c.dim = dim;
            c.k = k;
            weyl.apply(&mut c);
            c.eps = eps;
            c.fd_step = fd_step;
            ("maximize", Some(io), vec![])
        }
        Command::Weyl { sampling, io } => {
            sampling.apply(&mut c);
            ("weyl", Some(io), vec![])
        }
        Command::Symmetry { sampling, io } => {
            sampling.apply(&mut c);
            ("symmetry", Some(io), vec![])
        }
        Command::Accept { profile, only, io } => {
            c.profile = profile.map(Into::into);
            ("accept", Some(io), only)
        }
        Command::Catalog { catalog } => {
            c.catalog = catalog;
            ("catalog", None, vec![])
        }
    };
    let (config, json) = io.map(|io| (io.config, io.json)).unwrap_or_default();
    (Invocation { name, config, json, csv, only }, c)
}

fn sweep_flags(a: SweepArgs, c: &mut RunConfig, csv: &mut Option<PathBuf>) -> Io {
    a.tower.apply(c);
    c.ell = a.ell;
    *csv = a.grid.apply(c);
    a.io
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("BUBBLE_TOWER_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("BUBBLE_TOWER_THREADS = {v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Config(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (inv, from_flags) = flags(cli.command);
    let run = || -> Result<bool, Failure> {
        configure_threads()?;
        let base = match &inv.config {
            Some(p) => RunConfig::load(p).map_err(Failure::Config)?,
            None => RunConfig::default(),
        };
        commands::dispatch(&inv, base.overlay(from_flags))
    };
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("bubble-tower {}: {f}", inv.name);
            ExitCode::from(f.code())
        }
    }
}
