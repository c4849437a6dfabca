//! `rainbow`: build, validate and simulate coded caching schemes.
//!
//! Exit codes: 0 success, 1 domain error or failed check, 2 I/O or parse
//! error.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rainbow_coded::gf::Field;
use rainbow_coded::par::Execution;
use rainbow_coded::schemes::Delivery;

#[derive(Parser)]
#[command(
    name = "rainbow",
    version,
    about = "Coded caching schemes from rainbow colorings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a scheme and optionally write it as JSON.
    Build(BuildArgs),
    /// Check that a universe's coloring makes every structure rainbow.
    Validate {
        /// Universe JSON (families, operation, coloring).
        path: PathBuf,
        #[arg(long, default_value = "none", value_parser = commands::parse_sigma)]
        sigma: commands::SigmaArg,
    },
    /// Run placement, delivery and decoding over a set of demands.
    Simulate(SimulateArgs),
    /// Plan and verify the shuffle of a coded MapReduce instance.
    Mapreduce(MapReduceArgs),
    /// Evaluate lower bounds.
    Bounds {
        #[arg(long = "K")]
        users: usize,
        #[arg(long = "N")]
        files: usize,
        /// Cache size in files, e.g. `2` or `3/2`.
        #[arg(long = "M")]
        memory: String,
        /// Computation load for the distributed-computing bound.
        #[arg(long)]
        r: Option<String>,
    },
    /// Search for colorings of `[2, 2m]` with rainbow progressions.
    SearchRainbow(SearchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DeliveryArg {
    Gf2,
    Gf256,
    PerColor,
}

impl From<DeliveryArg> for Delivery {
    fn from(d: DeliveryArg) -> Self {
        match d {
            DeliveryArg::Gf2 => Delivery::Mds(Field::Gf2),
            DeliveryArg::Gf256 => Delivery::Mds(Field::Gf256),
            DeliveryArg::PerColor => Delivery::PerColor,
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    #[command(subcommand)]
    kind: BuildKind,
    /// Where to write the scheme JSON.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "gf2", global = true)]
    field: DeliveryArg,
}

#[derive(Subcommand)]
enum BuildKind {
    /// Users `[K]`, packets the `t`-subsets.
    Man {
        #[arg(long = "K")]
        users: usize,
        #[arg(long)]
        t: usize,
    },
    /// Users the `a`-subsets, packets the `b`-subsets of `[n]`.
    UnionSubsets {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
    /// From a `k x (k+1)` generator, rows separated by `;`, e.g. `1,0,1;0,1,1`.
    LinearBlock {
        #[arg(long)]
        generator: String,
        #[arg(long, default_value_t = 2)]
        q: u32,
    },
    /// The cyclic family on `[n]`.
    Cyclic {
        #[arg(long)]
        n: usize,
    },
    /// Integer-sum scheme from a progression-rainbow coloring.
    #[command(name = "rainbow-3ap")]
    Rainbow3ap {
        #[arg(long)]
        m: Option<usize>,
        /// Coloring JSON (`{"n", "A", "chi"}`); otherwise searched.
        #[arg(long)]
        explicit: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "greedy")]
        strategy: StrategyArg,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// From a placement delivery array text file.
    PdaImport { path: PathBuf },
    /// From a universe JSON, validated against a structure.
    Universe {
        path: PathBuf,
        #[arg(long, default_value = "none", value_parser = commands::parse_sigma)]
        sigma: commands::SigmaArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Greedy,
    Exact,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyArg {
    Exhaustive,
    Random,
    Worst,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scheme JSON written by `build`.
    path: PathBuf,
    /// Library size; defaults to the number of users.
    #[arg(long = "N")]
    files: Option<usize>,
    #[arg(long, value_enum, default_value = "worst")]
    policy: PolicyArg,
    /// Demand count for the random policy.
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    packet_size: usize,
    /// Re-derive delivery with another field instead of the stored one.
    #[arg(long, value_enum)]
    field: Option<DeliveryArg>,
    /// Writes `<out>.json` and `<out>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct MapReduceArgs {
    /// Universe JSON; omit when using `--cyclic`.
    path: Option<PathBuf>,
    #[arg(long, conflicts_with = "path")]
    cyclic: Option<usize>,
    #[arg(long, default_value = "none", value_parser = commands::parse_sigma)]
    sigma: commands::SigmaArg,
    #[arg(long, value_enum, default_value = "gf2")]
    field: DeliveryArg,
    /// Number of functions; defaults to the number of nodes.
    #[arg(long = "Q")]
    functions: Option<usize>,
    #[arg(long, default_value_t = 16)]
    value_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also print the multicast baseline load.
    #[arg(long)]
    compare: bool,
    /// Writes the plan report JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value = "greedy")]
    strategy: StrategyArg,
    #[arg(long)]
    budget: Option<usize>,
    /// Sums to leave uncolored (exact strategy), comma-separated.
    #[arg(long, value_delimiter = ',')]
    deletions: Vec<i64>,
    /// Writes the coloring JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Instead of one search, sweep greedy over `1..=m` and print exponents.
    #[arg(long)]
    sweep: bool,
}

fn exec(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(args) => commands::build(args),
        Command::Validate { path, sigma } => commands::validate(&path, &sigma),
        Command::Simulate(args) => commands::simulate(args),
        Command::Mapreduce(args) => commands::mapreduce(args),
        Command::Bounds {
            users,
            files,
            memory,
            r,
        } => commands::bounds(users, files, &memory, r.as_deref()),
        Command::SearchRainbow(args) => commands::search_rainbow(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
