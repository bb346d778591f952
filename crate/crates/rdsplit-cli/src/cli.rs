//! Command-line front end.
//!
//! Three commands share one option set:
//!
//! * `run` — a single simulation; prints the error summary and blow-up
//!   status.
//! * `study` — a refinement study; renders the error table as CSV or
//!   markdown to stdout or a file.
//! * `residual` — evaluates the manufactured-solution residual for the
//!   chosen test problem.
//!
//! Options resolve in three layers: built-in defaults, then an optional
//! JSON config file (`--config`), then individual flags. Every option has
//! a default except the command itself.
//!
//! Exit status: 0 on success (including expected blow-up under the
//! intentionally unstable `full` coupling), 2 when a `run` at the stable
//! `half` coupling blows up (unexpected), 1 on usage or I/O errors.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use rdsplit_core::metrics::summarize_errors;
use rdsplit_core::problem::residual_check;
use rdsplit_core::scheme::{cfl_margin, solve};
use serde::Deserialize;
use thiserror::Error;

use crate::harness::{
    grid_for, make_problem, render_table, run_study, Coupling, Format,
};

/// Residual-check parameters used by the `residual` command.
const RESIDUAL_SAMPLES: usize = 100;
const RESIDUAL_FD_STEP: f64 = 1e-4;

const HELP_HINT: &str = "For more information, try '--help'.";

/// Errors surfaced by [`parse_args`].
#[derive(Debug, Error)]
pub enum CliError {
    /// `--help` or similar: the payload goes to stdout, exit status 0.
    #[error("{0}")]
    Help(String),
    /// Anything malformed: unknown flag, bad value, unreadable or invalid
    /// config file. The payload is a ready-to-print usage message.
    #[error("{0}")]
    Usage(String),
}

/// What to do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Run a single simulation and print its error summary.
    Run,
    /// Run a refinement study and render the error table.
    Study,
    /// Evaluate the manufactured-solution residual for the chosen test.
    Residual,
}

/// Fully resolved invocation: defaults, config file, and flags merged.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub test: u32,
    pub m: usize,
    pub t_final: f64,
    pub coupling: Coupling,
    pub levels: Vec<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub record_errors: bool,
}

#[derive(Debug, Parser)]
#[command(
    name = "rdsplit",
    about = "Operator-split explicit solver for semilinear reaction-diffusion \
             problems on the unit square",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// JSON config file supplying defaults for any option.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Test problem id (1, 2, or 3).
    #[arg(long, global = true, value_name = "N")]
    test: Option<u32>,

    /// Grid size: spacing h = 1/M.
    #[arg(long = "M", global = true, value_name = "N")]
    m: Option<usize>,

    /// Final time of the simulation.
    #[arg(long = "T", global = true, value_name = "X")]
    t_final: Option<f64>,

    /// Time-step coupling: 'half' (k = h^2/2, stable) or 'full' (k = h^2).
    #[arg(long, global = true, value_name = "RULE")]
    coupling: Option<Coupling>,

    /// Study grid sizes, a comma-separated doubling ladder.
    #[arg(long, global = true, value_name = "A,B,C", value_delimiter = ',')]
    levels: Option<Vec<usize>>,

    /// Table output format: 'csv' or 'markdown'.
    #[arg(long, global = true, value_name = "FMT")]
    format: Option<Format>,

    /// Write rendered study output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Record the per-step error trace during `run` (true/false).
    #[arg(long, global = true, value_name = "BOOL")]
    record_errors: Option<bool>,
}

/// JSON config schema; keys mirror the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<Command>,
    test: Option<u32>,
    #[serde(rename = "M")]
    m: Option<usize>,
    #[serde(rename = "T")]
    t_final: Option<f64>,
    coupling: Option<String>,
    levels: Option<Vec<usize>>,
    format: Option<String>,
    out: Option<PathBuf>,
    record_errors: Option<bool>,
}

fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!("invalid config file {}: {e}", path.display()))
    })
}

fn usage_error(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("error: {msg}\n\n{HELP_HINT}"))
}

/// Parses an argument list (without the program name) into a fully
/// resolved [`RunConfig`].
///
/// Merge order: built-in defaults, overridden by the `--config` file,
/// overridden by flags; the command comes from the subcommand or, failing
/// that, the config file.
///
/// # Errors
///
/// [`CliError::Help`] when help output was requested (exit 0), otherwise
/// [`CliError::Usage`] carrying a printable message: unknown flags or
/// keys, malformed JSON, out-of-range values, or a missing command.
pub fn parse_args(args: &[String]) -> Result<RunConfig, CliError> {
    let mut argv = vec!["rdsplit".to_string()];
    argv.extend(args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                CliError::Help(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    })?;

    let file = match &cli.config {
        Some(path) => load_config(path)?,
        None => ConfigFile::default(),
    };
    let file_coupling = file
        .coupling
        .as_deref()
        .map(|s| s.parse::<Coupling>().map_err(usage_error))
        .transpose()?;
    let file_format = file
        .format
        .as_deref()
        .map(|s| s.parse::<Format>().map_err(usage_error))
        .transpose()?;

    let command = cli
        .command
        .or(file.command)
        .ok_or_else(|| usage_error("missing command: expected run, study, or residual"))?;
    let cfg = RunConfig {
        command,
        test: cli.test.or(file.test).unwrap_or(1),
        m: cli.m.or(file.m).unwrap_or(8),
        t_final: cli.t_final.or(file.t_final).unwrap_or(1.0),
        coupling: cli.coupling.or(file_coupling).unwrap_or(Coupling::Half),
        levels: cli.levels.or(file.levels).unwrap_or_else(|| vec![2, 4, 8, 16, 32]),
        format: cli.format.or(file_format).unwrap_or(Format::Markdown),
        out: cli.out.or(file.out),
        record_errors: cli.record_errors.or(file.record_errors).unwrap_or(true),
    };

    if !(1..=3).contains(&cfg.test) {
        return Err(usage_error(format!(
            "test must be 1, 2, or 3, got {}",
            cfg.test
        )));
    }
    if cfg.m < 2 {
        return Err(usage_error(format!("M must be at least 2, got {}", cfg.m)));
    }
    if !(cfg.t_final > 0.0 && cfg.t_final.is_finite()) {
        return Err(usage_error(format!(
            "T must be positive and finite, got {}",
            cfg.t_final
        )));
    }
    Ok(cfg)
}

fn execute_run(cfg: &RunConfig) -> i32 {
    let p = match make_problem(cfg.test) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return 1;
        }
    };
    let g = match grid_for(cfg.m, cfg.coupling, cfg.t_final) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("{e}");
            return 1;
        }
    };
    let r = solve(&p, &g, cfg.record_errors);

    println!("problem: {}", p.label);
    println!(
        "grid: M={} (h={}), N={} (k={}), T={}",
        g.m, g.h, g.n_steps, g.k, g.t_final
    );
    println!(
        "coupling: {} (stability margin {})",
        cfg.coupling,
        cfl_margin(p.a, g.k, g.h)
    );

    if r.blew_up {
        let step = r.blowup_step.expect("blown-up runs record the step");
        println!("status: blew up at step {step} of {}", g.n_steps);
        println!("wall time: {:.3} s", r.wall_time);
        // Divergence under the intentionally unstable coupling is the
        // expected regime; under the stable one it signals a real defect.
        return match cfg.coupling {
            Coupling::Full => 0,
            Coupling::Half => 2,
        };
    }

    println!("status: completed {} steps", g.n_steps);
    if r.error_trace.is_empty() {
        println!(
            "final-state interior L2 norm: {:e}",
            rdsplit_core::grid::l2_norm_interior(&r.final_field)
        );
    } else {
        match summarize_errors(&r.error_trace, &g) {
            Ok(s) => {
                println!(
                    "final-time L2 error: {:e}",
                    r.error_trace.last().copied().unwrap_or(f64::NAN)
                );
                println!(
                    "time-aggregated L2 errors: Linf {:e}, L2 {:e}, L1 {:e}",
                    s.linf_l2, s.l2_l2, s.l1_l2
                );
            }
            Err(e) => {
                eprintln!("{e}");
                return 1;
            }
        }
    }
    println!("wall time: {:.3} s", r.wall_time);
    0
}

fn execute_study(cfg: &RunConfig) -> i32 {
    let table = match run_study(cfg.test, cfg.coupling, &cfg.levels, cfg.t_final) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            return 1;
        }
    };
    let text = render_table(&table, cfg.format);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return 1;
            }
            0
        }
        None => {
            print!("{text}");
            0
        }
    }
}

fn execute_residual(cfg: &RunConfig) -> i32 {
    let p = match make_problem(cfg.test) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return 1;
        }
    };
    match residual_check(&p, RESIDUAL_SAMPLES, RESIDUAL_FD_STEP) {
        Ok(r) => {
            println!(
                "{}: max residual {r:e} ({RESIDUAL_SAMPLES} samples, fd step {RESIDUAL_FD_STEP:e})",
                p.label
            );
            0
        }
        Err(e) => {
            eprintln!("{e}");
            1
        }
    }
}

/// Executes a resolved configuration; returns the process exit status.
pub fn execute(cfg: &RunConfig) -> i32 {
    match cfg.command {
        Command::Run => execute_run(cfg),
        Command::Study => execute_study(cfg),
        Command::Residual => execute_residual(cfg),
    }
}

/// Parses and executes; the binary's whole behavior. `args` excludes the
/// program name.
pub fn run(args: &[String]) -> i32 {
    match parse_args(args) {
        Ok(cfg) => execute(&cfg),
        Err(CliError::Help(text)) => {
            println!("{text}");
            0
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("{msg}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(parts: &[&str]) -> Vec<String> {
        parts.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn study_with_defaults_resolves_table_one_configuration() {
        let cfg = parse_args(&sv(&["study", "--test", "1", "--coupling", "half"])).unwrap();
        assert_eq!(
            cfg,
            RunConfig {
                command: Command::Study,
                test: 1,
                m: 8,
                t_final: 1.0,
                coupling: Coupling::Half,
                levels: vec![2, 4, 8, 16, 32],
                format: Format::Markdown,
                out: None,
                record_errors: true,
            }
        );
    }

    #[test]
    fn run_flags_override_defaults() {
        let cfg = parse_args(&sv(&["run", "--test", "3", "--M", "16"])).unwrap();
        assert_eq!(cfg.command, Command::Run);
        assert_eq!(cfg.test, 3);
        assert_eq!(cfg.m, 16);
        assert_eq!(cfg.t_final, 1.0);
        assert_eq!(cfg.coupling, Coupling::Half);
    }

    #[test]
    fn out_of_range_test_id_is_a_usage_error() {
        let err = parse_args(&sv(&["study", "--test", "9"])).unwrap_err();
        match err {
            CliError::Usage(msg) => assert!(msg.contains("test must be 1, 2, or 3")),
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_flags_are_rejected() {
        assert!(matches!(
            parse_args(&sv(&["study", "--bogus"])),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn missing_command_is_a_usage_error() {
        let err = parse_args(&sv(&["--test", "1"])).unwrap_err();
        match err {
            CliError::Usage(msg) => assert!(msg.contains("missing command")),
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    #[test]
    fn help_is_distinguished_from_usage_errors() {
        assert!(matches!(
            parse_args(&sv(&["--help"])),
            Err(CliError::Help(_))
        ));
        assert_eq!(run(&sv(&["--help"])), 0);
        assert_eq!(run(&sv(&["study", "--test", "9"])), 1);
    }

    #[test]
    fn levels_flag_parses_comma_separated_ladder() {
        let cfg = parse_args(&sv(&["study", "--levels", "2,4,8"])).unwrap();
        assert_eq!(cfg.levels, vec![2, 4, 8]);
    }

    #[test]
    fn bad_parameter_values_are_usage_errors() {
        assert!(matches!(
            parse_args(&sv(&["run", "--M", "1"])),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse_args(&sv(&["run", "--T", "0"])),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse_args(&sv(&["run", "--coupling", "quarter"])),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn config_file_supplies_values_and_flags_override_it() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(
            &path,
            r#"{"command":"run","test":2,"M":4,"T":0.5,"coupling":"full",
               "levels":[2,4],"format":"csv","record_errors":false}"#,
        )
        .unwrap();
        let path_str = path.to_str().unwrap();

        let from_file = parse_args(&sv(&["--config", path_str])).unwrap();
        assert_eq!(from_file.command, Command::Run);
        assert_eq!(from_file.test, 2);
        assert_eq!(from_file.m, 4);
        assert_eq!(from_file.t_final, 0.5);
        assert_eq!(from_file.coupling, Coupling::Full);
        assert_eq!(from_file.levels, vec![2, 4]);
        assert_eq!(from_file.format, Format::Csv);
        assert!(!from_file.record_errors);

        let overridden = parse_args(&sv(&[
            "study",
            "--config",
            path_str,
            "--test",
            "3",
            "--coupling",
            "half",
        ]))
        .unwrap();
        assert_eq!(overridden.command, Command::Study, "subcommand wins");
        assert_eq!(overridden.test, 3);
        assert_eq!(overridden.coupling, Coupling::Half);
        assert_eq!(overridden.m, 4, "config still supplies unflagged values");
        assert_eq!(overridden.format, Format::Csv);
    }

    #[test]
    fn config_file_rejects_unknown_keys_and_bad_json() {
        let dir = tempfile::tempdir().unwrap();
        let unknown = dir.path().join("unknown.json");
        std::fs::write(&unknown, r#"{"teost": 1}"#).unwrap();
        match parse_args(&sv(&["run", "--config", unknown.to_str().unwrap()])) {
            Err(CliError::Usage(msg)) => assert!(msg.contains("teost"), "{msg}"),
            other => panic!("expected usage error, got {other:?}"),
        }

        let broken = dir.path().join("broken.json");
        std::fs::write(&broken, "{not json").unwrap();
        assert!(matches!(
            parse_args(&sv(&["run", "--config", broken.to_str().unwrap()])),
            Err(CliError::Usage(_))
        ));

        assert!(matches!(
            parse_args(&sv(&["run", "--config", "/no/such/file.json"])),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn identical_argv_resolves_identically() {
        let argv = sv(&["study", "--test", "2", "--levels", "2,4", "--format", "csv"]);
        assert_eq!(parse_args(&argv).unwrap(), parse_args(&argv).unwrap());
    }

    #[test]
    fn run_command_exit_codes_distinguish_expected_blowup() {
        let stable = parse_args(&sv(&["run", "--test", "1", "--M", "8"])).unwrap();
        assert_eq!(execute(&stable), 0);

        // The same grid under the doubled step diverges, but that is the
        // regime the full coupling exists to demonstrate: exit 0.
        let unstable =
            parse_args(&sv(&["run", "--test", "1", "--M", "8", "--coupling", "full"])).unwrap();
        assert_eq!(execute(&unstable), 0);
    }

    #[test]
    fn run_without_error_recording_still_succeeds() {
        let cfg = parse_args(&sv(&[
            "run",
            "--test",
            "2",
            "--M",
            "4",
            "--record-errors",
            "false",
        ]))
        .unwrap();
        assert!(!cfg.record_errors);
        assert_eq!(execute(&cfg), 0);
    }

    #[test]
    fn residual_command_succeeds_for_all_tests() {
        for test in 1..=3 {
            let cfg = RunConfig {
                command: Command::Residual,
                test,
                m: 8,
                t_final: 1.0,
                coupling: Coupling::Half,
                levels: vec![2, 4, 8, 16, 32],
                format: Format::Markdown,
                out: None,
                record_errors: true,
            };
            assert_eq!(execute(&cfg), 0, "test {test}");
        }
    }

    #[test]
    fn study_writes_byte_identical_files_across_invocations() {
        let dir = tempfile::tempdir().unwrap();
        let first = dir.path().join("a.csv");
        let second = dir.path().join("b.csv");
        for path in [&first, &second] {
            let cfg = RunConfig {
                command: Command::Study,
                test: 1,
                m: 8,
                t_final: 1.0,
                coupling: Coupling::Half,
                levels: vec![2, 4, 8],
                format: Format::Csv,
                out: Some(path.clone()),
                record_errors: true,
            };
            assert_eq!(execute(&cfg), 0);
        }
        let a = std::fs::read(&first).unwrap();
        let b = std::fs::read(&second).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b);
    }

    #[test]
    fn study_to_unwritable_path_exits_with_io_error() {
        let cfg = RunConfig {
            command: Command::Study,
            test: 1,
            m: 8,
            t_final: 1.0,
            coupling: Coupling::Half,
            levels: vec![2, 4],
            format: Format::Csv,
            out: Some(PathBuf::from("/no/such/dir/table.csv")),
            record_errors: true,
        };
        assert_eq!(execute(&cfg), 1);
    }

    #[test]
    fn bad_ladder_reaches_execute_as_plain_failure() {
        let cfg = parse_args(&sv(&["study", "--levels", "2,4,7"])).unwrap();
        assert_eq!(execute(&cfg), 1);
    }
}
