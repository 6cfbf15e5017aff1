mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Witness search, reductions and certificate checking for AHT, RT², IPT²
/// and HIL on bounded instances.
#[derive(Parser, Debug)]
#[command(name = "hindman", version)]
pub struct Cli {
    /// Worker threads for the searches.
    #[arg(long, global = true, env = "HINDMAN_THREADS", default_value_t = 1)]
    pub threads: usize,

    /// Largest bit position any constructed integer may use, plus one.
    #[arg(long, global = true, default_value_t = 63)]
    pub bit_budget: u32,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bit utilities.
    #[command(subcommand)]
    Util(Util),
    /// Search for the least witness of a bounded instance.
    Solve(SolveArgs),
    /// Run a reduction pipeline.
    Reduce(ReduceArgs),
    /// Recheck a certificate, including every nested stage.
    Verify {
        path: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum Util {
    /// Lowest set bit position.
    Lam { n: u64 },
    /// Highest set bit position.
    Mu { n: u64 },
    /// Whether an increasing list is apart.
    Apart {
        #[arg(value_parser = parse_list)]
        list: List,
    },
    /// Adjacent sums in run order.
    As {
        #[arg(value_parser = parse_list)]
        list: List,
        /// Shortest run length.
        #[arg(long, default_value_t = 1)]
        min: usize,
        /// Longest run length (default: the whole list).
        #[arg(long)]
        max: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Principle {
    Aht,
    Rt2,
    Ipt2,
    Hil,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    Rt2ToAht,
    AhtToIpt2,
    Chain,
    Word,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageChoice {
    Search,
    Chain,
}

/// `expr:SRC` or `table:PATH`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringArg {
    Expr(String),
    Table(PathBuf),
}

fn parse_coloring(s: &str) -> Result<ColoringArg, String> {
    if let Some(src) = s.strip_prefix("expr:") {
        Ok(ColoringArg::Expr(src.to_string()))
    } else if let Some(path) = s.strip_prefix("table:") {
        Ok(ColoringArg::Table(PathBuf::from(path)))
    } else {
        Err("expected expr:SRC or table:PATH".into())
    }
}

/// Comma-separated integers, kept as one argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct List(pub Vec<u64>);

fn parse_list(s: &str) -> Result<List, String> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|e| format!("bad integer {t:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(List)
}

#[derive(Args, Debug)]
pub struct ColoringOpts {
    /// Number of colors.
    #[arg(long)]
    pub colors: Option<u32>,
    /// Coloring as expr:SRC or table:PATH.
    #[arg(long, value_parser = parse_coloring)]
    pub coloring: Option<ColoringArg>,
    /// Witness size m.
    #[arg(long)]
    pub size: usize,
    /// For solve: largest run sum (aht), exclusive element bound (rt2, ipt2)
    /// or base set size (hil). For reduce: the coloring domain, or the AHT
    /// search bound of the word pipeline.
    #[arg(long)]
    pub bound: Option<u64>,
    /// Stop after this many search nodes.
    #[arg(long)]
    pub node_limit: Option<u64>,
    /// Certificate path (default: derived from the principle and a digest).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub principle: Principle,
    #[command(flatten)]
    pub opts: ColoringOpts,
    /// Drop the apartness requirement (AHT only).
    #[arg(long)]
    pub no_apart: bool,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    pub pipeline: Pipeline,
    #[command(flatten)]
    pub opts: ColoringOpts,
    /// Exclusive exponent bound for the RT2 stage.
    #[arg(long)]
    pub rt2_bound: Option<u64>,
    /// How aht-to-ipt2 obtains its AHT witness.
    #[arg(long, value_enum, default_value_t = StageChoice::Search)]
    pub aht_stage: StageChoice,
    /// Largest run sum for the AHT search of aht-to-ipt2 (default: the
    /// whole projected domain).
    #[arg(long)]
    pub aht_bound: Option<u64>,
    /// Use this AHT witness for aht-to-ipt2 instead of searching.
    #[arg(long, value_parser = parse_list)]
    pub witness: Option<List>,
    /// Word file for the word pipeline.
    #[arg(long)]
    pub word: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::Exit::Usage as u8)
        }
    }
}
