//! The `farey` command line: every subcommand prints one JSON report.
//!
//! Exit status is 0 on success, 2 for invalid arguments and 3 when the
//! computation itself fails. Failures print a JSON error object on stderr.

pub mod cache;
pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use farey_core::{
    ball, build_cover, eigen_directions, find_safe_cone, geodesic_witness, orbit_growth,
    safety_window, FareyError, MappingClass, Slope, Window,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use cache::{CacheEntry, CacheError, DistanceCache};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

/// Environment variable naming the distance cache file.
pub const CACHE_ENV: &str = "FAREY_CACHE";

#[derive(Debug, Parser)]
#[command(
    name = "farey",
    version,
    about = "Exact computations in the Farey graph"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance and a geodesic between two slopes.
    Dist(DistArgs),
    /// Ball of radius N around a slope, truncated to a window.
    Ball(BallArgs),
    /// Cone cover of the ball of radius N around 1/0.
    Cover(RadiusArgs),
    /// A cone of directions avoiding the ball of radius N around 1/0.
    SafeCone(RadiusArgs),
    /// Orbit of a slope under a mapping class, with distances.
    Orbit(OrbitArgs),
    /// Fixed directions of an Anosov class.
    Eigen(EigenArgs),
    /// Draw a ball or a cone cover as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(long, value_parser = parse_slope_arg, allow_hyphen_values = true)]
    pub from: Slope,
    #[arg(long, value_parser = parse_slope_arg, allow_hyphen_values = true)]
    pub to: Slope,
    /// Distance cache file; defaults to $FAREY_CACHE if set.
    #[arg(long, value_name = "PATH")]
    pub cache: Option<PathBuf>,
    /// Rewrite the cache file with one line per pair after the lookup.
    #[arg(long)]
    pub compact_cache: bool,
}

#[derive(Debug, Args)]
pub struct BallArgs {
    #[arg(long, value_parser = parse_slope_arg, allow_hyphen_values = true, default_value = "1/0")]
    pub center: Slope,
    #[arg(short = 'n', long = "radius")]
    pub n: u32,
    /// Window bounds `A` or `A,B` (`|a| <= A`, `|b| <= B`).
    #[arg(long, value_parser = parse_window_arg)]
    pub window: Window,
}

#[derive(Debug, Args)]
pub struct RadiusArgs {
    #[arg(short = 'n', long = "radius")]
    pub n: u32,
    /// Window bounds `A` or `A,B`.
    #[arg(long, value_parser = parse_window_arg)]
    pub window: Window,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// Row-major entries `p,q,r,s`.
    #[arg(long, value_parser = parse_matrix_arg, allow_hyphen_values = true)]
    pub matrix: MappingClass,
    #[arg(long, value_parser = parse_slope_arg, allow_hyphen_values = true)]
    pub start: Slope,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub steps: u32,
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[arg(long, value_parser = parse_matrix_arg, allow_hyphen_values = true)]
    pub matrix: MappingClass,
    /// Number of continued-fraction coefficients to report.
    #[arg(short = 'k', value_parser = clap::value_parser!(u32).range(1..=10_000))]
    pub k: u32,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("figure").required(true).args(["ball", "cover"]))]
pub struct RenderArgs {
    /// Draw the ball around `--center`.
    #[arg(long)]
    pub ball: bool,
    /// Draw the cone cover of the ball around 1/0.
    #[arg(long)]
    pub cover: bool,
    #[arg(long, value_parser = parse_slope_arg, allow_hyphen_values = true, default_value = "1/0")]
    pub center: Slope,
    #[arg(short = 'n', long = "radius")]
    pub n: u32,
    #[arg(long, value_parser = parse_window_arg)]
    pub window: Window,
    #[arg(long, value_name = "PATH")]
    pub svg: PathBuf,
    /// Pixels per lattice unit.
    #[arg(long, default_value_t = svg::DEFAULT_SCALE, value_parser = clap::value_parser!(u32).range(1..=1000))]
    pub scale: u32,
}

fn parse_slope_arg(s: &str) -> Result<Slope, String> {
    s.parse::<Slope>().map_err(|e| e.to_string())
}

fn parse_matrix_arg(s: &str) -> Result<MappingClass, String> {
    s.parse::<MappingClass>().map_err(|e| e.to_string())
}

/// `A` or `A,B` with exact integers.
pub fn parse_window_arg(s: &str) -> Result<Window, String> {
    let int = |x: &str| {
        x.trim()
            .parse::<i64>()
            .map_err(|e| format!("invalid window bound {x:?}: {e}"))
    };
    let w = match s.split_once(',') {
        None => Window::square(int(s)?),
        Some((a, b)) => Window::new(int(a)?, int(b)?),
    };
    w.map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistReport {
    pub from: Slope,
    pub to: Slope,
    pub distance: u32,
    /// A shortest path; present when the distance was computed rather than
    /// read from the cache.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<Slope>>,
}

/// Summary printed by `render`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderReport {
    pub svg: PathBuf,
    pub members: usize,
    pub cones: usize,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Farey(#[from] FareyError),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Farey(e) => farey_kind(e),
            CliError::Cache(_) => "Cache",
            CliError::Io { .. } => "Io",
            CliError::Json(_) => "Json",
        }
    }

    /// Bad input is an argument error; everything else is a computation error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Farey(
                FareyError::ZeroVector
                | FareyError::InvalidWindow { .. }
                | FareyError::NotUnimodular { .. }
                | FareyError::ParseMatrix(_)
                | FareyError::ParseSlope { .. }
                | FareyError::OrientationReversing(_)
                | FareyError::NotAnosov(_)
                | FareyError::RadiusTooSmall { .. }
                | FareyError::NoSteps,
            ) => EXIT_USAGE,
            _ => EXIT_COMPUTE,
        }
    }
}

fn farey_kind(e: &FareyError) -> &'static str {
    match e {
        FareyError::ZeroVector => "ZeroVector",
        FareyError::Overflow(_) => "Overflow",
        FareyError::NotAdjacent(..) => "NotAdjacent",
        FareyError::InfiniteSlope => "InfiniteSlope",
        FareyError::InvalidWindow { .. } => "InvalidWindow",
        FareyError::NotUnimodular { .. } => "NotUnimodular",
        FareyError::ParseMatrix(_) => "ParseMatrix",
        FareyError::OrientationReversing(_) => "OrientationReversing",
        FareyError::NotAnosov(_) => "NotAnosov",
        FareyError::EmptyCone { .. } => "EmptyCone",
        FareyError::RadiusTooSmall { .. } => "RadiusTooSmall",
        FareyError::NoSteps => "NoSteps",
        FareyError::CoverFailed(_) => "CoverFailed",
        FareyError::NoSafeCone { .. } => "NoSafeCone",
        FareyError::Unstable(..) => "Unstable",
        FareyError::ParseSlope { .. } => "ParseSlope",
        FareyError::Surd(_) => "Surd",
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
    exit: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    obstructing: Option<&'a [Slope]>,
}

fn write_error(
    stderr: &mut dyn Write,
    kind: &str,
    message: String,
    exit: i32,
    obstructing: Option<&[Slope]>,
) {
    let report = ErrorReport {
        error: kind,
        message,
        exit,
        obstructing,
    };
    let _ = writeln!(
        stderr,
        "{}",
        serde_json::to_string(&report).expect("error report serializes")
    );
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })
}

fn dist(args: &DistArgs, env_cache: Option<PathBuf>) -> Result<String, CliError> {
    let (s, t) = (args.from, args.to);
    let cache_path = args.cache.clone().or(env_cache);
    let mut cache = cache_path.map(DistanceCache::open).transpose()?;

    let report = match cache.as_ref().and_then(|c| c.get(s, t)) {
        Some(distance) => DistReport {
            from: s,
            to: t,
            distance,
            witness: None,
        },
        None => {
            let w = geodesic_witness(s, t)?;
            let distance = w.length() as u32;
            if let Some(c) = cache.as_mut() {
                c.insert(
                    s,
                    t,
                    CacheEntry {
                        distance,
                        window: safety_window(s, t),
                    },
                )?;
            }
            DistReport {
                from: s,
                to: t,
                distance,
                witness: Some(w.vertices),
            }
        }
    };
    if let (Some(c), true) = (&cache, args.compact_cache) {
        c.compact()?;
    }
    to_json(&report)
}

fn execute(cli: &Cli, env_cache: Option<PathBuf>) -> Result<String, CliError> {
    match &cli.command {
        Command::Dist(a) => dist(a, env_cache),
        Command::Ball(a) => to_json(&ball(a.center, a.n, a.window)?),
        Command::Cover(a) => to_json(&build_cover(a.n, a.window)?),
        Command::SafeCone(a) => to_json(&find_safe_cone(a.n, a.window)?),
        Command::Orbit(a) => to_json(&orbit_growth(&a.matrix, a.start, a.steps)?),
        Command::Eigen(a) => to_json(&eigen_directions(&a.matrix, a.k as usize)?),
        Command::Render(a) => {
            let b = ball(
                if a.cover { Slope::INFINITY } else { a.center },
                a.n,
                a.window,
            )?;
            let (doc, cones) = if a.cover {
                let cover = build_cover(a.n, a.window)?;
                (svg::render_cover(&cover, &b, a.scale), cover.cones.len())
            } else {
                (svg::render_ball(&b, a.scale), 0)
            };
            write_file(&a.svg, &doc)?;
            to_json(&RenderReport {
                svg: a.svg.clone(),
                members: b.len(),
                cones,
            })
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit status. Reads the cache location from `FAREY_CACHE`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_cache_env(
        args,
        std::env::var_os(CACHE_ENV).map(PathBuf::from),
        stdout,
        stderr,
    )
}

/// [`run`] with the cache location given explicitly instead of read from
/// the environment.
pub fn run_with_cache_env<I, T>(
    args: I,
    env_cache: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let message = e.render().to_string();
            write_error(
                stderr,
                "Usage",
                message.trim_end().to_string(),
                EXIT_USAGE,
                None,
            );
            return EXIT_USAGE;
        }
    };
    match execute(&cli, env_cache) {
        Ok(json) => {
            let written = match &cli.out {
                Some(path) => write_file(path, &json),
                None => stdout
                    .write_all(json.as_bytes())
                    .map_err(|source| CliError::Io {
                        path: PathBuf::from("<stdout>"),
                        source,
                    }),
            };
            match written {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    write_error(stderr, e.kind(), e.to_string(), EXIT_COMPUTE, None);
                    EXIT_COMPUTE
                }
            }
        }
        Err(e) => {
            let code = e.exit_code();
            let obstructing = match &e {
                CliError::Farey(FareyError::NoSafeCone { obstructing }) => {
                    Some(obstructing.as_slice())
                }
                _ => None,
            };
            write_error(stderr, e.kind(), e.to_string(), code, obstructing);
            code
        }
    }
}
