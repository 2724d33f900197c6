//! Command-line and config-file settings, merged and validated into a [`RunConfig`].
//!
//! Every setting can come from a `--key value` flag or from a `key = value`
//! line in the file named by `--config`; flags win. Sites are 1-based here and
//! converted to 0-based only when building core specs.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use enaqt_core::analysis::INFINITE_MU_CUTOFF;
use enaqt_core::solver::Method;
use enaqt_core::Topology;

use crate::error::CliError;

/// Geometry accepted on the command line. `infinite` is the truncated
/// semi-infinite chain and only makes sense for `sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyArg {
    Chain,
    Ring,
    Infinite,
}

impl TopologyArg {
    pub fn core(self) -> Topology {
        match self {
            TopologyArg::Chain => Topology::Chain,
            TopologyArg::Ring => Topology::Ring,
            TopologyArg::Infinite => Topology::SemiInfinite,
        }
    }
}

impl FromStr for TopologyArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "chain" => Ok(TopologyArg::Chain),
            "ring" | "circle" => Ok(TopologyArg::Ring),
            "infinite" => Ok(TopologyArg::Infinite),
            _ => Err(format!("unknown topology '{s}' (chain, ring, infinite)")),
        }
    }
}

impl fmt::Display for TopologyArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TopologyArg::Chain => "chain",
            TopologyArg::Ring => "ring",
            TopologyArg::Infinite => "infinite",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Log,
    Linear,
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "log" => Ok(Scale::Log),
            "linear" => Ok(Scale::Linear),
            _ => Err(format!("unknown scale '{s}' (log, linear)")),
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Log => "log",
            Scale::Linear => "linear",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (csv, json)")),
        }
    }
}

/// Solver for the `efficiency` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodArg(pub Method);

impl FromStr for MethodArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "direct" => Ok(MethodArg(Method::Direct)),
            "accumulator" => Ok(MethodArg(Method::Accumulator)),
            "propagation" => Ok(MethodArg(Method::Propagation)),
            _ => Err(format!(
                "unknown method '{s}' (direct, accumulator, propagation)"
            )),
        }
    }
}

macro_rules! settings {
    ($($field:ident: $ty:ty = $key:literal, $help:literal;)*) => {
        /// Raw, unvalidated settings. `None` means "not given".
        #[derive(Debug, Clone, Default, PartialEq, Args)]
        pub struct Settings {
            $(
                #[arg(long = $key, help = $help, allow_negative_numbers = true)]
                pub $field: Option<$ty>,
            )*
        }

        impl Settings {
            /// Every key accepted by flags and config files.
            pub const KEYS: &'static [&'static str] = &[$($key),*];

            /// Sets one key from its text value.
            pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
                match key {
                    $(
                        $key => {
                            let parsed = value.parse::<$ty>().map_err(|e| CliError::BadValue {
                                key: key.to_string(),
                                value: value.to_string(),
                                reason: e.to_string(),
                            })?;
                            self.$field = Some(parsed);
                        }
                    )*
                    _ => return Err(CliError::UnknownKey(key.to_string())),
                }
                Ok(())
            }

            /// `self` where given, `base` otherwise.
            pub fn overlay(self, base: Settings) -> Settings {
                Settings { $($field: self.$field.or(base.$field),)* }
            }

            /// Keys that carry a value.
            pub fn given(&self) -> Vec<&'static str> {
                let mut keys = Vec::new();
                $(if self.$field.is_some() { keys.push($key); })*
                keys
            }
        }
    };
}

settings! {
    topology: TopologyArg = "topology", "chain, ring, or infinite (sweep only)";
    n: usize = "n", "number of sites";
    trap: usize = "trap", "trap site, 1-based";
    init: usize = "init", "initial site, 1-based";
    kappa: f64 = "kappa", "trapping rate";
    mu: f64 = "mu", "loss rate";
    gamma: f64 = "gamma", "dephasing rate";
    coupling: f64 = "coupling", "hopping strength V";
    offset: usize = "offset", "infinite chain: start this many sites right of the trap region";
    method: MethodArg = "method", "direct, accumulator, or propagation";
    gamma_min: f64 = "gamma-min", "smallest nonzero dephasing rate of the curve grid";
    gamma_max: f64 = "gamma-max", "largest dephasing rate of the curve grid";
    gamma_count: usize = "gamma-count", "number of nonzero dephasing rates";
    gamma_scale: Scale = "gamma-scale", "log or linear";
    kappa_min: f64 = "kappa-min", "sweep grid";
    kappa_max: f64 = "kappa-max", "sweep grid";
    kappa_count: usize = "kappa-count", "sweep grid";
    kappa_scale: Scale = "kappa-scale", "sweep grid";
    mu_min: f64 = "mu-min", "sweep grid";
    mu_max: f64 = "mu-max", "sweep grid";
    mu_count: usize = "mu-count", "sweep grid";
    mu_scale: Scale = "mu-scale", "sweep grid";
    format: Format = "format", "csv (default) or json";
    output: PathBuf = "output", "output file; stdout when absent";
    workers: usize = "workers", "worker threads for sweeps and tables";
}

#[derive(Debug, Clone, Args)]
pub struct CommandArgs {
    /// key = value settings file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Efficiency,
    Curve,
    Optimize,
    Sweep,
    Table,
    Infinite,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Efficiency => "efficiency",
            CommandKind::Curve => "curve",
            CommandKind::Optimize => "optimize",
            CommandKind::Sweep => "sweep",
            CommandKind::Table => "table",
            CommandKind::Infinite => "infinite",
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Trapping efficiency at one dephasing rate
    Efficiency(CommandArgs),
    /// Efficiency over a grid of dephasing rates (gamma = 0 always included)
    Curve(CommandArgs),
    /// Best dephasing rate and the resulting gain
    Optimize(CommandArgs),
    /// Optimize the dephasing rate over a (kappa, mu) grid
    Sweep(CommandArgs),
    /// Maximum gain over (kappa, mu) for every trap/initial pair
    Table(CommandArgs),
    /// Gain on the infinite chain with traps to the left
    Infinite(CommandArgs),
}

impl Command {
    pub fn split(self) -> (CommandKind, CommandArgs) {
        match self {
            Command::Efficiency(a) => (CommandKind::Efficiency, a),
            Command::Curve(a) => (CommandKind::Curve, a),
            Command::Optimize(a) => (CommandKind::Optimize, a),
            Command::Sweep(a) => (CommandKind::Sweep, a),
            Command::Table(a) => (CommandKind::Table, a),
            Command::Infinite(a) => (CommandKind::Infinite, a),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "enaqt",
    version,
    about = "Dephasing-assisted transport on chains and rings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Evenly spaced grid, on a log or linear scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: Scale,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self.scale {
            Scale::Log => enaqt_core::analysis::log_grid(self.min, self.max, self.count),
            Scale::Linear if self.count == 1 => vec![self.min],
            Scale::Linear => (0..self.count)
                .map(|i| {
                    let t = i as f64 / (self.count - 1) as f64;
                    self.min + t * (self.max - self.min)
                })
                .collect(),
        }
    }
}

/// Single system, sites 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub topology: TopologyArg,
    pub n: usize,
    pub trap: usize,
    pub init: usize,
    pub kappa: f64,
    pub mu: f64,
    pub coupling: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepSystem {
    Finite {
        topology: TopologyArg,
        n: usize,
        trap: usize,
        init: usize,
    },
    Infinite {
        offset: usize,
    },
}

/// Validated work description.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Efficiency {
        point: Point,
        gamma: f64,
        method: Method,
    },
    Curve {
        point: Point,
        gamma: Grid,
    },
    Optimize {
        point: Point,
    },
    Sweep {
        system: SweepSystem,
        kappa: Grid,
        mu: Grid,
    },
    Table {
        topology: TopologyArg,
        n: usize,
    },
    Infinite {
        kappa: f64,
        mu: f64,
        offset: usize,
    },
}

impl Job {
    pub fn kind(&self) -> CommandKind {
        match self {
            Job::Efficiency { .. } => CommandKind::Efficiency,
            Job::Curve { .. } => CommandKind::Curve,
            Job::Optimize { .. } => CommandKind::Optimize,
            Job::Sweep { .. } => CommandKind::Sweep,
            Job::Table { .. } => CommandKind::Table,
            Job::Infinite { .. } => CommandKind::Infinite,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub job: Job,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
}

pub const DEFAULT_GAMMA_GRID: Grid = Grid {
    min: 1e-3,
    max: 1e3,
    count: 64,
    scale: Scale::Log,
};

/// Loss rates for infinite-chain sweeps start at the cutoff.
pub const DEFAULT_INFINITE_MU_GRID: Grid = Grid {
    min: INFINITE_MU_CUTOFF,
    max: 1e2,
    count: 48,
    scale: Scale::Log,
};

pub const DEFAULT_RATE_GRID: Grid = Grid {
    min: 1e-4,
    max: 1e2,
    count: 48,
    scale: Scale::Log,
};

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_config_text(text: &str) -> Result<Settings, CliError> {
    let mut settings = Settings::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Syntax {
                line: lineno + 1,
                text: raw.to_string(),
            });
        };
        settings.set(key.trim(), value.trim())?;
    }
    Ok(settings)
}

pub fn read_config_file(path: &Path) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_text(&text)
}

/// Parses a full argument list (program name first) plus the optional config
/// file it names, and validates the result.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliError::Usage)?;
    let (kind, args) = cli.command.split();
    let file = match &args.config {
        Some(path) => read_config_file(path)?,
        None => Settings::default(),
    };
    validate(kind, args.settings.overlay(file))
}

fn keys_for(kind: CommandKind, topology: Option<TopologyArg>) -> Vec<&'static str> {
    const POINT: [&str; 7] = ["topology", "n", "trap", "init", "kappa", "mu", "coupling"];
    let mut keys = vec!["format", "output", "workers"];
    match kind {
        CommandKind::Efficiency => keys.extend(POINT.iter().chain(&["gamma", "method"])),
        CommandKind::Curve => keys.extend(POINT.iter().chain(&[
            "gamma-min",
            "gamma-max",
            "gamma-count",
            "gamma-scale",
        ])),
        CommandKind::Optimize => keys.extend(POINT),
        CommandKind::Sweep if topology == Some(TopologyArg::Infinite) => {
            keys.extend(["topology", "offset"].iter().chain(&SWEEP_GRID))
        }
        CommandKind::Sweep => {
            keys.extend(["topology", "n", "trap", "init"].iter().chain(&SWEEP_GRID))
        }
        CommandKind::Table => keys.extend(["topology", "n"]),
        CommandKind::Infinite => keys.extend(["kappa", "mu", "offset"]),
    }
    keys
}

const SWEEP_GRID: [&str; 8] = [
    "kappa-min",
    "kappa-max",
    "kappa-count",
    "kappa-scale",
    "mu-min",
    "mu-max",
    "mu-count",
    "mu-scale",
];

fn require<T: Copy>(value: Option<T>, key: &'static str) -> Result<T, CliError> {
    value.ok_or(CliError::Missing(key))
}

fn check_rate(key: &'static str, value: f64) -> Result<f64, CliError> {
    if !value.is_finite() || value < 0.0 {
        return Err(CliError::NegativeRate { key, value });
    }
    Ok(value)
}

fn check_sites(topology: TopologyArg, n: usize, trap: usize, init: usize) -> Result<(), CliError> {
    let min = topology.core().min_sites();
    if n < min {
        return Err(CliError::InvalidValue {
            key: "n",
            reason: format!("{topology} needs at least {min} sites, got {n}"),
        });
    }
    for (key, site) in [("trap", trap), ("init", init)] {
        if site == 0 || site > n {
            return Err(CliError::InvalidSite { key, site, n });
        }
    }
    if trap == init {
        return Err(CliError::CoincidentSites(trap));
    }
    Ok(())
}

fn point(s: &Settings) -> Result<Point, CliError> {
    let topology = s.topology.unwrap_or(TopologyArg::Chain);
    if topology == TopologyArg::Infinite {
        return Err(CliError::InvalidValue {
            key: "topology",
            reason: "use the 'infinite' subcommand or 'sweep' for the infinite chain".into(),
        });
    }
    let n = require(s.n, "n")?;
    let trap = require(s.trap, "trap")?;
    let init = require(s.init, "init")?;
    check_sites(topology, n, trap, init)?;
    let coupling = s.coupling.unwrap_or(1.0);
    if !(coupling.is_finite() && coupling > 0.0) {
        return Err(CliError::InvalidValue {
            key: "coupling",
            reason: format!("must be positive, got {coupling}"),
        });
    }
    Ok(Point {
        topology,
        n,
        trap,
        init,
        kappa: check_rate("kappa", require(s.kappa, "kappa")?)?,
        mu: check_rate("mu", require(s.mu, "mu")?)?,
        coupling,
    })
}

fn grid(
    name: &'static str,
    parts: (Option<f64>, Option<f64>, Option<usize>, Option<Scale>),
    default: Grid,
    allow_zero: bool,
) -> Result<Grid, CliError> {
    let g = Grid {
        min: parts.0.unwrap_or(default.min),
        max: parts.1.unwrap_or(default.max),
        count: parts.2.unwrap_or(default.count),
        scale: parts.3.unwrap_or(default.scale),
    };
    let positive = g.scale == Scale::Log || !allow_zero;
    let bad = |reason: String| CliError::InvalidValue { key: name, reason };
    if !(g.min.is_finite() && g.max.is_finite()) || g.min < 0.0 || (positive && g.min <= 0.0) {
        return Err(bad(format!(
            "grid bounds must be {}, got [{}, {}]",
            if positive { "positive" } else { "non-negative" },
            g.min,
            g.max
        )));
    }
    if g.count == 0 {
        return Err(bad("grid needs at least one point".into()));
    }
    if g.count > 1 && g.max <= g.min {
        return Err(bad(format!(
            "grid must increase, got [{}, {}]",
            g.min, g.max
        )));
    }
    Ok(g)
}

/// Checks a merged settings set for `kind` and builds the run description.
pub fn validate(kind: CommandKind, s: Settings) -> Result<RunConfig, CliError> {
    let allowed = keys_for(kind, s.topology);
    if let Some(key) = s.given().into_iter().find(|k| !allowed.contains(k)) {
        return Err(CliError::Irrelevant {
            key,
            command: kind.name(),
        });
    }
    if s.workers == Some(0) {
        return Err(CliError::InvalidValue {
            key: "workers",
            reason: "need at least one worker".into(),
        });
    }
    let job = match kind {
        CommandKind::Efficiency => Job::Efficiency {
            point: point(&s)?,
            gamma: check_rate("gamma", s.gamma.unwrap_or(0.0))?,
            method: s.method.map_or(Method::Direct, |m| m.0),
        },
        CommandKind::Curve => Job::Curve {
            point: point(&s)?,
            gamma: grid(
                "gamma",
                (s.gamma_min, s.gamma_max, s.gamma_count, s.gamma_scale),
                DEFAULT_GAMMA_GRID,
                true,
            )?,
        },
        CommandKind::Optimize => Job::Optimize { point: point(&s)? },
        CommandKind::Sweep => {
            let topology = s.topology.unwrap_or(TopologyArg::Chain);
            let system = if topology == TopologyArg::Infinite {
                SweepSystem::Infinite {
                    offset: offset(s.offset)?,
                }
            } else {
                let n = require(s.n, "n")?;
                let trap = require(s.trap, "trap")?;
                let init = require(s.init, "init")?;
                check_sites(topology, n, trap, init)?;
                SweepSystem::Finite {
                    topology,
                    n,
                    trap,
                    init,
                }
            };
            let mu = grid(
                "mu",
                (s.mu_min, s.mu_max, s.mu_count, s.mu_scale),
                if matches!(system, SweepSystem::Infinite { .. }) {
                    DEFAULT_INFINITE_MU_GRID
                } else {
                    DEFAULT_RATE_GRID
                },
                false,
            )?;
            if matches!(system, SweepSystem::Infinite { .. }) {
                check_infinite_mu("mu-min", mu.min)?;
            }
            Job::Sweep {
                system,
                mu,
                kappa: grid(
                    "kappa",
                    (s.kappa_min, s.kappa_max, s.kappa_count, s.kappa_scale),
                    DEFAULT_RATE_GRID,
                    false,
                )?,
            }
        }
        CommandKind::Table => {
            let topology = s.topology.unwrap_or(TopologyArg::Chain);
            let n = require(s.n, "n")?;
            if topology == TopologyArg::Infinite || n < topology.core().min_sites() {
                return Err(CliError::InvalidValue {
                    key: "n",
                    reason: format!("no table for {n} sites on a {topology}"),
                });
            }
            Job::Table { topology, n }
        }
        CommandKind::Infinite => {
            let mu = check_rate("mu", require(s.mu, "mu")?)?;
            check_infinite_mu("mu", mu)?;
            Job::Infinite {
                kappa: check_rate("kappa", require(s.kappa, "kappa")?)?,
                mu,
                offset: offset(s.offset)?,
            }
        }
    };
    Ok(RunConfig {
        job,
        format: s.format.unwrap_or(Format::Csv),
        output: s.output,
        workers: s.workers,
    })
}

fn check_infinite_mu(key: &'static str, mu: f64) -> Result<(), CliError> {
    if mu < INFINITE_MU_CUTOFF {
        return Err(CliError::InvalidValue {
            key,
            reason: format!("the infinite chain needs mu >= {INFINITE_MU_CUTOFF}, got {mu}"),
        });
    }
    Ok(())
}

fn offset(value: Option<usize>) -> Result<usize, CliError> {
    match value.unwrap_or(1) {
        0 => Err(CliError::InvalidValue {
            key: "offset",
            reason: "the start must lie right of the trap region (offset >= 1)".into(),
        }),
        o => Ok(o),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_command_key_is_a_setting() {
        for kind in [
            CommandKind::Efficiency,
            CommandKind::Curve,
            CommandKind::Optimize,
            CommandKind::Sweep,
            CommandKind::Table,
            CommandKind::Infinite,
        ] {
            for topology in [None, Some(TopologyArg::Infinite)] {
                for key in keys_for(kind, topology) {
                    assert!(Settings::KEYS.contains(&key), "{key}");
                }
            }
        }
    }

    #[test]
    fn file_syntax() {
        let s = parse_config_text("# comment\nkappa = 0.1\n\n mu=0.01 # trailing\n").unwrap();
        assert_eq!(s.kappa, Some(0.1));
        assert_eq!(s.mu, Some(0.01));
        assert!(matches!(
            parse_config_text("kappa 0.1"),
            Err(CliError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_config_text("kapa = 0.1"),
            Err(CliError::UnknownKey(_))
        ));
    }

    #[test]
    fn linear_grid() {
        let g = Grid {
            min: 0.0,
            max: 1.0,
            count: 5,
            scale: Scale::Linear,
        };
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
