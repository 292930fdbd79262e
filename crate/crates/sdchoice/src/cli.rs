//! Command-line interface for batch use and CI.
//!
//! Exit codes are the machine contract: 0 means the check passed (or the
//! evaluation succeeded), 1 means a violation, manipulation or
//! inefficiency was found and a report was emitted, 2 means a usage or
//! parse error. Structured output (`--format structured`) is stable JSON
//! with rationals as numerator/denominator pairs.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::analysis::{
    brute_force_sd_efficiency, check_anonymity_neutrality, check_ex_post, check_sd_efficiency,
    check_strong_sd_sp, find_sd_manipulation, AnalysisError,
};
use crate::lotteries::{Lottery, LotteryError};
use crate::preferences::{
    enumerate_weak_orders, AgentId, AgentPermutation, AlternativePermutation, ParseError,
    PreferenceError, Profile, Universe,
};
use crate::report;
use crate::schemes::{
    builtin_scheme_names, scheme_by_name, SchemeError, SocialDecisionScheme, TabulatedScheme,
};
use crate::theorem::{lift_profile, replay, replay_lifted, ReplayError};

const EXIT_OK: u8 = 0;
const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
enum CliError {
    #[error("unknown scheme `{name}` (built-ins: {builtins})", builtins = builtin_scheme_names().join(", "))]
    UnknownScheme { name: String },
    #[error("{0}")]
    Preference(#[from] PreferenceError),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Lottery(#[from] LotteryError),
    #[error("{0}")]
    Scheme(#[from] SchemeError),
    #[error("{0}")]
    Analysis(#[from] AnalysisError),
    #[error("{0}")]
    Replay(#[from] ReplayError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum OutputFormat {
    Text,
    Structured,
}

#[derive(Parser, Debug)]
#[command(
    name = "sdchoice",
    version,
    about = "Exact-arithmetic toolkit for probabilistic social choice",
    after_help = "Exit codes: 0 check passed / evaluation done, 1 violation or inefficiency found, 2 usage or parse error."
)]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SchemeArgs {
    /// Built-in scheme name (rd, rsd, uniform, serial).
    #[arg(long)]
    scheme: Option<String>,
    /// Tabulated scheme file: `<profile path>: <lottery>` per line; takes
    /// precedence over --scheme.
    #[arg(long)]
    table: Option<PathBuf>,
}

impl SchemeArgs {
    fn resolve(&self) -> Result<Box<dyn SocialDecisionScheme>, CliError> {
        if let Some(table) = &self.table {
            return Ok(Box::new(TabulatedScheme::from_file(table)?));
        }
        match &self.scheme {
            Some(name) => {
                scheme_by_name(name).ok_or_else(|| CliError::UnknownScheme { name: name.clone() })
            }
            None => Err(CliError::UnknownScheme {
                name: String::new(),
            }),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a scheme on a profile and print the lottery.
    Eval {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Profile file in the `agent <id>: <relation>` format.
        #[arg(long)]
        profile: PathBuf,
        /// Universe override as a comma-separated list, e.g. `a,b,c,d`.
        #[arg(long)]
        alternatives: Option<String>,
    },
    /// Check ex post efficiency of a lottery on a profile.
    CheckExpost {
        #[arg(long)]
        profile: PathBuf,
        /// Lottery text, e.g. `1/2*a + 1/2*b`.
        #[arg(long)]
        lottery: String,
        #[arg(long)]
        alternatives: Option<String>,
    },
    /// Check SD-efficiency of a lottery on a profile (exact LP).
    CheckSdeff {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        lottery: String,
        /// Use the brute-force search over lotteries with common
        /// denominator up to this bound instead of the LP checker.
        #[arg(long)]
        max_denominator: Option<u32>,
        #[arg(long)]
        alternatives: Option<String>,
    },
    /// Search for a profitable unilateral misreport.
    CheckSp {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        profile: PathBuf,
        /// Check strong SD-strategyproofness (incomparable deviations also
        /// count as violations).
        #[arg(long)]
        strong: bool,
        /// Restrict the search to these agents, e.g. `1,3`.
        #[arg(long)]
        agents: Option<String>,
        #[arg(long)]
        alternatives: Option<String>,
    },
    /// Check the combined anonymity/neutrality constraint for one
    /// permutation pair.
    Symmetry {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        profile: PathBuf,
        /// Agent permutation in cycle notation, e.g. `(1 2)(3 4)`.
        #[arg(long)]
        pi: String,
        /// Alternative permutation in cycle notation, e.g. `(a b)(c d)`.
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        alternatives: Option<String>,
    },
    /// Replay the impossibility chain against a scheme; always finds a
    /// violation for any total scheme.
    Replay {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Lift the chain to this many agents (with --alternatives).
        #[arg(long)]
        agents: Option<u32>,
        /// Lift the chain to this universe (superset of a,b,c,d).
        #[arg(long)]
        alternatives: Option<String>,
    },
    /// Enumerate all weak orders over a universe in canonical order.
    Enumerate {
        #[arg(long)]
        alternatives: String,
        /// Print only the count.
        #[arg(long)]
        count_only: bool,
    },
    /// Embed a profile into a larger agent set and universe.
    Lift {
        #[arg(long)]
        profile: PathBuf,
        /// Total number of agents after lifting.
        #[arg(long)]
        agents: u32,
        /// Target universe as a comma-separated list.
        #[arg(long)]
        alternatives: String,
    },
}

/// Parses `argv` and runs the selected command, returning the process exit
/// code. The first element of `argv` is the program name.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // Let clap print help/version through its own machinery.
            let code = if err.exit_code() == 0 {
                EXIT_OK
            } else {
                EXIT_USAGE
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            EXIT_USAGE
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_profile(path: &Path, alternatives: &Option<String>) -> Result<Profile, CliError> {
    let text = read_file(path)?;
    let universe = alternatives.as_deref().map(Universe::parse).transpose()?;
    Ok(Profile::parse(&text, universe.as_ref())?)
}

fn parse_agents(text: &str) -> Result<Vec<AgentId>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u32>()
                .map(AgentId::new)
                .map_err(|_| CliError::Preference(PreferenceError::NonPositiveAgent))
        })
        .collect()
}

fn emit(
    format: OutputFormat,
    text: impl FnOnce() -> String,
    value: impl FnOnce() -> serde_json::Value,
) {
    match format {
        OutputFormat::Text => println!("{}", text()),
        OutputFormat::Structured => println!("{}", value()),
    }
}

fn dispatch(cli: &Cli) -> Result<u8, CliError> {
    let format = cli.format;
    match &cli.command {
        Command::Eval {
            scheme,
            profile,
            alternatives,
        } => {
            let scheme = scheme.resolve()?;
            let profile = load_profile(profile, alternatives)?;
            let lottery = scheme.evaluate(&profile)?;
            emit(
                format,
                || lottery.to_string(),
                || {
                    serde_json::json!({
                        "scheme": scheme.name(),
                        "profile": report::profile_value(&profile),
                        "lottery": report::lottery_value(&lottery),
                    })
                },
            );
            Ok(EXIT_OK)
        }
        Command::CheckExpost {
            profile,
            lottery,
            alternatives,
        } => {
            let profile = load_profile(profile, alternatives)?;
            let lottery = Lottery::parse(lottery, profile.universe())?;
            let verdict = check_ex_post(&profile, &lottery)?;
            emit(
                format,
                || verdict.to_string(),
                || report::efficiency_value(&profile, &lottery, &verdict),
            );
            Ok(if verdict.is_efficient() {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            })
        }
        Command::CheckSdeff {
            profile,
            lottery,
            max_denominator,
            alternatives,
        } => {
            let profile = load_profile(profile, alternatives)?;
            let lottery = Lottery::parse(lottery, profile.universe())?;
            let verdict = match max_denominator {
                Some(bound) => brute_force_sd_efficiency(&profile, &lottery, *bound)?,
                None => check_sd_efficiency(&profile, &lottery)?,
            };
            emit(
                format,
                || verdict.to_string(),
                || report::efficiency_value(&profile, &lottery, &verdict),
            );
            Ok(if verdict.is_efficient() {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            })
        }
        Command::CheckSp {
            scheme,
            profile,
            strong,
            agents,
            alternatives,
        } => {
            let scheme = scheme.resolve()?;
            let profile = load_profile(profile, alternatives)?;
            let agents = agents.as_deref().map(parse_agents).transpose()?;
            let witness = if *strong {
                check_strong_sd_sp(scheme.as_ref(), &profile, agents.as_deref(), None)?
            } else {
                find_sd_manipulation(scheme.as_ref(), &profile, agents.as_deref(), None)?
            };
            match witness {
                None => {
                    emit(
                        format,
                        || "no manipulation found".to_string(),
                        || serde_json::json!({ "manipulable": false }),
                    );
                    Ok(EXIT_OK)
                }
                Some(witness) => {
                    emit(
                        format,
                        || witness.to_string(),
                        || {
                            serde_json::json!({
                                "manipulable": true,
                                "witness": report::manipulation_value(&witness),
                            })
                        },
                    );
                    Ok(EXIT_VIOLATION)
                }
            }
        }
        Command::Symmetry {
            scheme,
            profile,
            pi,
            sigma,
            alternatives,
        } => {
            let scheme = scheme.resolve()?;
            let profile = load_profile(profile, alternatives)?;
            let pi = AgentPermutation::parse(pi)?;
            let sigma = AlternativePermutation::parse(sigma)?;
            let verdict = check_anonymity_neutrality(scheme.as_ref(), &profile, &pi, &sigma)?;
            emit(
                format,
                || {
                    if verdict.holds {
                        "anonymity+neutrality constraint holds".to_string()
                    } else {
                        let w = verdict.witness.as_ref().unwrap();
                        format!(
                            "anonymity+neutrality constraint fails at {}: f(R)({}) = {} but f(R^pi^sigma)({}) = {}",
                            w.alternative,
                            w.alternative,
                            w.original_lottery.mass_of(&w.alternative).unwrap(),
                            w.sigma.apply(&w.alternative),
                            w.transformed_lottery
                                .mass_of(&w.sigma.apply(&w.alternative))
                                .unwrap(),
                        )
                    }
                },
                || report::symmetry_value(&verdict),
            );
            Ok(if verdict.holds {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            })
        }
        Command::Replay {
            scheme,
            agents,
            alternatives,
        } => {
            let scheme = scheme.resolve()?;
            let report = match (agents, alternatives) {
                (None, None) => replay(scheme.as_ref())?,
                (agents, alternatives) => {
                    let universe = match alternatives {
                        Some(text) => Universe::parse(text)?,
                        None => Universe::parse("a,b,c,d")?,
                    };
                    let num_agents = agents.unwrap_or(4);
                    replay_lifted(scheme.as_ref(), num_agents, &universe)?
                }
            };
            emit(
                format,
                || report.to_string(),
                || report::violation_value(&report),
            );
            Ok(EXIT_VIOLATION)
        }
        Command::Enumerate {
            alternatives,
            count_only,
        } => {
            let universe = Universe::parse(alternatives)?;
            let orders = enumerate_weak_orders(&universe);
            if *count_only {
                emit(
                    format,
                    || orders.len().to_string(),
                    || serde_json::json!({ "count": orders.len() }),
                );
            } else {
                emit(
                    format,
                    || {
                        orders
                            .iter()
                            .map(|order| order.to_string())
                            .collect::<Vec<_>>()
                            .join("\n")
                    },
                    || {
                        serde_json::json!({
                            "count": orders.len(),
                            "orders": orders.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
                        })
                    },
                );
            }
            Ok(EXIT_OK)
        }
        Command::Lift {
            profile,
            agents,
            alternatives,
        } => {
            let base = load_profile(profile, &None)?;
            let universe = Universe::parse(alternatives)?;
            let lifted = lift_profile(&base, *agents, &universe)?;
            emit(
                format,
                || lifted.to_string().trim_end().to_string(),
                || report::profile_value(&lifted),
            );
            Ok(EXIT_OK)
        }
    }
}
