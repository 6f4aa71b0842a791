use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use revelation::format::parse_deception_file;
use revelation::report::{
    action_revelation_report, build_direct_report, message_revelation_report, render_build_direct,
    render_revelation, render_solve, solve_report,
};
use revelation::{
    build_direct, check_revelation_action, check_revelation_message, enumerate_bne_with,
    parse_game_file, Deceptions, Error, Format, GameFile, PreferenceModel, RevelationVerdict,
    SearchOptions, DEFAULT_CAP,
};

const EXIT_INPUT: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "revelation",
    version,
    about = "Equilibria and revelation checks for finite Bayesian mechanisms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Game file (TOML).
    file: PathBuf,
    /// Maximum number of candidate strategy profiles to enumerate.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
    /// Worker threads for the enumeration (defaults to all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Output::Table)]
    output: Output,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a game file.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Output::Table)]
        output: Output,
    },
    /// Enumerate every pure Bayesian Nash equilibrium.
    Solve(Common),
    /// Build the direct mechanism of each equilibrium (or of one, by index).
    BuildDirect {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        equilibrium: Option<usize>,
    },
    /// Check whether the file's scf is truthfully implemented by the direct
    /// mechanisms of the equilibria that implement it.
    CheckRevelation {
        #[command(flatten)]
        common: Common,
        /// Preferences for the action-format multistage game.
        #[arg(long, value_enum, default_value_t = Prefs::Privacy)]
        prefs: Prefs,
        /// `cyclic`, or a TOML file with `[[deception]]` tables.
        #[arg(long, default_value = "cyclic")]
        deception: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Table,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum Prefs {
    Standard,
    Privacy,
}

impl From<Prefs> for PreferenceModel {
    fn from(p: Prefs) -> Self {
        match p {
            Prefs::Standard => PreferenceModel::Standard,
            Prefs::Privacy => PreferenceModel::PrivacyLexicographic,
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SearchSpace { .. } => EXIT_CAP,
            Error::Format { .. }
            | Error::DeceptionFixedPoint { .. }
            | Error::SingleType { .. }
            | Error::Shape(_) => EXIT_INPUT,
            _ => EXIT_INTERNAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn load(path: &Path) -> Result<GameFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    parse_game_file(&text).map_err(|e| Failure::input(format!("{}:\n{e}", path.display())))
}

fn emit<T: Serialize>(
    output: Output,
    value: &T,
    table: impl FnOnce(&T) -> String,
) -> Result<(), Failure> {
    match output {
        Output::Table => print!("{}", table(value)),
        Output::Structured => {
            let json = serde_json::to_string_pretty(value).map_err(|e| Failure {
                code: EXIT_INTERNAL,
                message: e.to_string(),
            })?;
            println!("{json}");
        }
    }
    Ok(())
}

fn options(c: &Common) -> SearchOptions {
    SearchOptions {
        cap: c.cap,
        workers: c.workers,
    }
}

#[derive(Serialize)]
struct ValidateSummary {
    valid: bool,
    agents: usize,
    type_profiles: usize,
    outcomes: usize,
    format: Format,
    strategy_profiles: usize,
    scf_declared: bool,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { file, output } => {
            let game = load(&file)?;
            let summary = ValidateSummary {
                valid: true,
                agents: game.spec.num_agents(),
                type_profiles: game.spec.type_profiles().len(),
                outcomes: game.spec.outcomes().len(),
                format: game.mechanism.format(),
                strategy_profiles: game.mechanism.profiles().len(),
                scf_declared: game.scf.is_some(),
            };
            emit(output, &summary, |s| {
                format!(
                    "valid: {} agents, {} type profiles, {} outcomes, {}-format mechanism with {} strategy profiles, scf {}\n",
                    s.agents,
                    s.type_profiles,
                    s.outcomes,
                    s.format,
                    s.strategy_profiles,
                    if s.scf_declared { "declared" } else { "not declared" }
                )
            })
        }
        Command::Solve(c) => {
            let game = load(&c.file)?;
            let eqs = enumerate_bne_with(&game.spec, &game.mechanism, &options(&c))?;
            let report = solve_report(&game.spec, &game.mechanism, game.scf.as_ref(), &eqs)?;
            emit(c.output, &report, render_solve)
        }
        Command::BuildDirect {
            common: c,
            equilibrium,
        } => {
            let game = load(&c.file)?;
            let eqs = enumerate_bne_with(&game.spec, &game.mechanism, &options(&c))?;
            let selected: Vec<usize> = match equilibrium {
                Some(k) if k < eqs.len() => vec![k],
                Some(k) => {
                    return Err(Failure::input(format!(
                        "equilibrium index {k} out of range ({} found)",
                        eqs.len()
                    )))
                }
                None => (0..eqs.len()).collect(),
            };
            let directs = selected
                .into_iter()
                .map(|k| Ok((k, build_direct(&game.spec, &game.mechanism, &eqs[k])?)))
                .collect::<Result<Vec<_>, Error>>()?;
            let report =
                build_direct_report(&game.spec, &game.mechanism, game.scf.as_ref(), &directs);
            emit(c.output, &report, render_build_direct)
        }
        Command::CheckRevelation {
            common: c,
            prefs,
            deception,
        } => {
            let game = load(&c.file)?;
            let scf = game.scf.as_ref().ok_or_else(|| {
                Failure::input(format!("{}: no [[scf]] table declared", c.file.display()))
            })?;
            let report = match game.mechanism.format() {
                Format::Message => {
                    let r = check_revelation_message(&game.spec, &game.mechanism, scf, c.cap)?;
                    message_revelation_report(&game.spec, &game.mechanism, &r)
                }
                Format::Action => {
                    let deceptions = if deception == "cyclic" {
                        None
                    } else {
                        let text = std::fs::read_to_string(&deception)
                            .map_err(|e| Failure::input(format!("{deception}: {e}")))?;
                        let d: Deceptions = parse_deception_file(&text, &game.spec)
                            .map_err(|e| Failure::input(format!("{deception}:\n{e}")))?;
                        Some(d)
                    };
                    let r = check_revelation_action(
                        &game.spec,
                        &game.mechanism,
                        scf,
                        c.cap,
                        prefs.into(),
                        deceptions.as_ref(),
                    )?;
                    action_revelation_report(&game.spec, &game.mechanism, &r)
                }
            };
            emit(c.output, &report, render_revelation)?;
            if report.verdict() == RevelationVerdict::Inconsistent {
                return Err(Failure {
                    code: EXIT_INTERNAL,
                    message: "per-equilibrium verdicts are inconsistent".to_string(),
                });
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
