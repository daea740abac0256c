use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fbtiling::analysis::Beta;
use fbtiling::{Algorithm, RationalPoint};

#[derive(Parser, Debug)]
#[command(
    name = "fbtiling",
    version,
    about = "Farey–Brocot tilings of the interval and the square"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Face, edge and vertex counts of the triangulation graph.
    Census(CensusArgs),
    /// Moments of the cell measures.
    Moments(MomentArgs),
    /// Truncated Dirichlet series with a tail bound.
    Dirichlet(DirichletArgs),
    /// Ratios of moments to their predicted main terms.
    Asym(AsymArgs),
    /// Descent towards a rational point.
    Locate(LocateArgs),
    /// Structural checks.
    Verify(VerifyArgs),
    /// The one-dimensional partition.
    Classical(ClassicalArgs),
    /// SVG picture of a tiling.
    Render(RenderArgs),
}

/// A single depth or an inclusive range of depths.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Depths {
    #[arg(long)]
    pub depth: Option<u32>,

    /// Inclusive range `A..B`.
    #[arg(long = "n", value_parser = parse_range)]
    pub n: Option<RangeInclusive<u32>>,
}

impl Depths {
    pub fn range(&self) -> RangeInclusive<u32> {
        match (&self.n, self.depth) {
            (Some(r), _) => r.clone(),
            (None, Some(d)) => d..=d,
            (None, None) => unreachable!("clap requires one of the two"),
        }
    }
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    #[arg(long, value_parser = parse_algorithm)]
    pub algo: Algorithm,
    #[command(flatten)]
    pub depths: Depths,
}

#[derive(Args, Debug)]
pub struct MomentArgs {
    #[arg(long, value_parser = parse_algorithm)]
    pub algo: Algorithm,
    #[command(flatten)]
    pub depths: Depths,
    /// Order, decimal or `p/q`.
    #[arg(long, value_parser = parse_beta)]
    pub beta: Beta,
    /// Require exact rational arithmetic.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug)]
pub struct DirichletArgs {
    #[arg(long, value_parser = parse_algorithm)]
    pub algo: Algorithm,
    #[arg(long, value_parser = parse_beta)]
    pub beta: Beta,
    /// Largest denominator summed directly.
    #[arg(long, conflicts_with = "tolerance")]
    pub qmax: Option<u64>,
    /// Relative tail bound; the cut-off is chosen to meet it.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Args, Debug)]
pub struct AsymArgs {
    #[arg(long, value_parser = parse_algorithm)]
    pub algo: Algorithm,
    #[command(flatten)]
    pub depths: Depths,
    #[arg(long, value_parser = parse_beta)]
    pub beta: Beta,
}

#[derive(Args, Debug)]
pub struct LocateArgs {
    #[arg(long, value_parser = parse_algorithm)]
    pub algo: Algorithm,
    #[arg(long)]
    pub depth: u32,
    /// Target `p1/q1,p2/q2` in the unit square.
    #[arg(long, value_parser = parse_point)]
    pub point: RationalPoint,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_algorithm)]
    pub algo: Algorithm,
    #[arg(long)]
    pub depth: u32,
    /// Comma-separated check names, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub checks: Vec<String>,
}

#[derive(Args, Debug)]
pub struct ClassicalArgs {
    #[command(flatten)]
    pub depths: Depths,
    /// Also report the moment of this order.
    #[arg(long, value_parser = parse_beta)]
    pub beta: Option<Beta>,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    #[arg(long, value_parser = parse_algorithm)]
    pub algo: Algorithm,
    #[arg(long)]
    pub depth: u32,
    /// Destination file; the SVG goes to standard output without it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Most vertex labels drawn.
    #[arg(long, default_value_t = 200)]
    pub labels: usize,
    /// Side of the square in pixels.
    #[arg(long, default_value_t = 512)]
    pub size: u32,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: fbtiling::Error| e.to_string())
}

fn parse_beta(s: &str) -> Result<Beta, String> {
    s.parse().map_err(|e: fbtiling::Error| e.to_string())
}

fn parse_point(s: &str) -> Result<RationalPoint, String> {
    s.parse().map_err(|e: fbtiling::Error| e.to_string())
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got `{s}`"))?;
    let a: u32 = a
        .trim()
        .parse()
        .map_err(|_| format!("bad range start `{a}`"))?;
    let b: u32 = b
        .trim()
        .parse()
        .map_err(|_| format!("bad range end `{b}`"))?;
    if a > b {
        return Err(format!("empty range `{s}`"));
    }
    Ok(a..=b)
}
