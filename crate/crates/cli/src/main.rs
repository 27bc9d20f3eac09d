mod commands;
mod load;
mod oracle;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Finite typed topological spaces: clusters, tracks, surgeries, indexing.
#[derive(Parser, Debug)]
#[command(name = "typtop", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Points CSV (`id,x,y`) or a space JSON written by `build`.
    #[arg(long, short, global = true)]
    pub input: Option<PathBuf>,
    /// Type family for CSV input, e.g. `left:1,2` or `disk:1,sqrt(2)`.
    /// Repeat for several families.
    #[arg(long = "types", global = true)]
    pub families: Vec<String>,
    /// Type label `p`, e.g. `left-1`.
    #[arg(long = "type", short = 'p', global = true)]
    pub p: Option<String>,
    /// Second type label `q` (`p <= q`).
    #[arg(long, short, global = true)]
    pub q: Option<String>,
    /// Origin point: `x,y` for geometric spaces, or a point id.
    #[arg(long, global = true)]
    pub origin: Option<String>,
    /// Output directory.
    #[arg(long, default_value = ".", global = true)]
    pub out: PathBuf,
    /// Cross-check results against brute force on small inputs.
    #[arg(long, global = true)]
    pub oracle_check: bool,
    /// Size limit for `--oracle-check`.
    #[arg(long, default_value_t = 12, global = true)]
    pub oracle_limit: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the space and write it as JSON.
    Build,
    /// Tracks of the origin under `--type`.
    Tracks,
    /// Transitive closure of the origin under `--type`.
    Cluster,
    /// Connected parts of every track.
    Components,
    /// Entrance points of a set (default: all points).
    Port {
        /// Set members (repeatable); `x,y` or id.
        #[arg(long = "point")]
        points: Vec<String>,
    },
    /// Report straightness at the origin and cut it straight.
    Straighten,
    /// Apply or replay surgeries.
    Surgery {
        #[command(subcommand)]
        action: SurgeryAction,
    },
    /// Surrounding tree of a port-like set rooted at the origin.
    Tree {
        #[arg(long = "point", required = true)]
        points: Vec<String>,
    },
    /// Index the cluster of the origin (`--q` for the full extension).
    Index,
    /// Branches of the origin's cluster.
    Branches {
        /// Emit every branch prefix, not only maximal branches.
        #[arg(long)]
        all_prefixes: bool,
    },
    /// Plain DBSCAN on the point coordinates.
    Dbscan {
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 4)]
        min_pts: usize,
    },
    /// Compare DBSCAN (eps = radius of `--type`) with transitive closures.
    Compare {
        #[arg(long, default_value_t = 4)]
        min_pts: usize,
    },
    /// SVG scatter with an overlay.
    Plot {
        #[arg(long, value_enum, default_value_t = OverlayKind::Tracks)]
        overlay: OverlayKind,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 4)]
        min_pts: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum SurgeryAction {
    /// Surgery keeping the cluster of `--y` and pruning that of `--z`.
    Apply {
        #[arg(long)]
        z: String,
        #[arg(long)]
        y: String,
    },
    /// Separation surgeries over a sequence of points.
    Separate {
        #[arg(long = "point", required = true)]
        points: Vec<String>,
    },
    /// Replay a log written by `apply`, `separate` or `tree`.
    Replay {
        #[arg(long)]
        log: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverlayKind {
    None,
    Tracks,
    Branches,
    Dbscan,
}

/// Bad invocation that clap cannot see (missing `--type`, unknown point...).
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_ORACLE: u8 = 4;

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return EXIT_USAGE;
    }
    if err.downcast_ref::<oracle::Mismatch>().is_some() {
        return EXIT_ORACLE;
    }
    match err.downcast_ref::<typtop_core::Error>() {
        Some(e) if !e.is_data_error() => EXIT_PRECONDITION,
        // unreadable files, bad CSV/JSON, invalid spaces
        _ => EXIT_DATA,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
