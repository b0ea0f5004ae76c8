//! Experiment runner: one subcommand per audit, CSV/JSON reports, seeded runs.

pub mod commands;
pub mod output;
pub mod params;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Arg, ArgAction, ArgMatches, Command};
use workbench_core::report::Format;

use crate::commands::Plan;
use crate::params::{parse_config, Params};

#[derive(Debug)]
pub enum CliError {
    /// invalid or missing parameters
    Config(Vec<String>),
    Budget(String),
    Run(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Run(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(d) => {
                write!(f, "invalid configuration:")?;
                for line in d {
                    write!(f, "\n  - {line}")?;
                }
                Ok(())
            }
            CliError::Budget(m) => write!(f, "budget exceeded: {m}"),
            CliError::Run(m) => write!(f, "run failed: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<workbench_core::Error> for CliError {
    fn from(e: workbench_core::Error) -> Self {
        if commands::is_budget(&e) {
            CliError::Budget(e.to_string())
        } else {
            CliError::Run(e.to_string())
        }
    }
}

fn value(name: &'static str, help: &'static str) -> Arg {
    Arg::new(name).long(name).value_name("VALUE").help(help)
}

fn global(name: &'static str, help: &'static str) -> Arg {
    value(name, help).global(true)
}

fn sub(name: &'static str, about: &'static str, args: &[(&'static str, &'static str)]) -> Command {
    Command::new(name).about(about).args(args.iter().map(|(n, h)| value(n, h)))
}

const Z_ARGS: [(&str, &str); 4] = [
    ("zm", "X-set level m [1]"),
    ("zl", "X-set l [2]"),
    ("zn", "X-set n [0]"),
    ("j", "iterate bound J [3]"),
];

pub fn command() -> Command {
    let smooth_args: Vec<(&str, &str)> = [
        ("resolution", "ψ table resolution [4096]"),
        ("maxp", "largest dyadic exponent for the exponent table [6]"),
        ("words", "longest word in the separation audit [3]"),
        ("p", "coordinates per block parameter p [2]"),
    ]
    .into_iter()
    .chain(Z_ARGS)
    .collect();
    let glue_args: Vec<(&str, &str)> = [
        ("functional", "midpoint | gaussian | slope | one [midpoint]"),
        ("delta", "Hölder exponent δ in (0, 1/2) [0.25]"),
        ("support", "support tuples per stage [32]"),
        ("stages", "comma-separated p values, one stage each [2,4,8]"),
    ]
    .into_iter()
    .chain(Z_ARGS)
    .collect();
    let maps: [(&str, &str); 3] = [
        ("family", "exp | poly | both [both]"),
        ("a", "exponential family parameter [0.5]"),
        ("c", "polynomial family parameter, |c| <= 1/2 [0.5]"),
    ];
    Command::new("workbench")
        .about("Audits and Monte Carlo experiments around Thompson's group F")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .args([
            global("seed", "RNG seed (required by stochastic subcommands)"),
            global("samples", "Monte Carlo sample count"),
            global("grid", "time grid size M (power of two)"),
            global("out", "output directory, or file for a single table [reports]"),
            global("format", "csv | json [csv]"),
            global("budget", "enumeration budget"),
            global("threads", "worker threads"),
            global("config", "key=value config file; flags override it"),
            Arg::new("check")
                .long("check")
                .global(true)
                .action(ArgAction::SetTrue)
                .help("validate the configuration and exit without running"),
        ])
        .subcommand(sub("count", "counting tables and series cross-checks", &[
            ("nmax", "largest n [40]"),
            ("kmax", "largest k [8]"),
        ]))
        .subcommand(sub("orbits", "enumerate the orbit tuple set", &[
            ("n", "tuple length parameter [4]"),
            ("k", "exponent bound [2]"),
            ("order", "rightmost | leftmost [rightmost]"),
        ]))
        .subcommand(sub("folner", "Følner ratios, containment and equivariance", &[
            ("m", "largest refinement level, at most 4 [3]"),
            ("l", "comma-separated l values [2,3,4]"),
            ("n", "comma-separated n values [0,1,2]"),
            ("placement", "chained | literal [chained]"),
        ]))
        .subcommand(sub("smooth", "ψ invariants, generator regularity and Z-set audits", &smooth_args))
        .subcommand(
            Command::new("wiener")
                .about("Monte Carlo experiments on Wiener measure")
                .subcommand_required(true)
                .subcommand(sub("moments", "endpoint derivative moments", &[("l", "comma-separated moments [0,1,2,3,4]")]))
                .subcommand(sub("quasi", "quasi-invariance under test maps", &maps))
                .subcommand(sub("lemma2", "concentration of the partition sums", &[
                    ("a", "exponential map parameter [0.5]"),
                    ("n", "number of partition intervals [64]"),
                    ("eps", "ε, decimal or a/b [1/32]"),
                    ("constant-samples", "paths for the moment constants [20000]"),
                ]))
                .subcommand(sub("lemma3", "telescoping product decay", &[
                    maps[0],
                    maps[1],
                    maps[2],
                    ("kmin", "smallest log2 n [3]"),
                    ("kmax", "largest log2 n [12]"),
                ])),
        )
        .subcommand(sub("glue", "averaging estimator trend for the smooth generators", &glue_args))
        .subcommand(Command::new("audit-all").about("every experiment at its defaults"))
}

/// Subcommand path and the raw values of the innermost matches.
fn collect(m: &ArgMatches) -> (Vec<String>, BTreeMap<String, String>, bool) {
    let mut path = Vec::new();
    let mut cur = m;
    while let Some((name, next)) = cur.subcommand() {
        path.push(name.to_string());
        cur = next;
    }
    let check = cur.get_flag("check");
    let mut raw = BTreeMap::new();
    for id in cur.ids() {
        if id.as_str() == "check" {
            continue;
        }
        if let Ok(Some(v)) = cur.try_get_one::<String>(id.as_str()) {
            raw.insert(id.to_string(), v.clone());
        }
    }
    (path, raw, check)
}

pub struct Invocation {
    pub plan: Plan,
    pub out: PathBuf,
    pub format: Format,
    pub threads: Option<usize>,
    pub check: bool,
}

/// Resolves matches into a plan, collecting every diagnostic before failing.
pub fn resolve(m: &ArgMatches) -> Result<Invocation, CliError> {
    let (path, flags, check) = collect(m);
    let mut diags = Vec::new();
    let config = match flags.get("config") {
        Some(file) => match std::fs::read_to_string(file) {
            Ok(text) => {
                let (config, errors) = parse_config(&text);
                diags.extend(errors);
                config
            }
            Err(e) => {
                diags.push(format!("cannot read config `{file}`: {e}"));
                BTreeMap::new()
            }
        },
        None => BTreeMap::new(),
    };
    let mut p = Params::new(config, flags);
    let format = p.get("format", Format::Csv);
    let threads = p.opt::<usize>("threads");
    p.require(threads != Some(0), "--threads must be positive");
    let out = PathBuf::from(p.get("out", "reports".to_string()));
    let names: Vec<&str> = path.iter().map(String::as_str).collect();
    let plan = match names.as_slice() {
        ["count"] => commands::plan_count(&mut p),
        ["orbits"] => commands::plan_orbits(&mut p),
        ["folner"] => commands::plan_folner(&mut p),
        ["smooth"] => commands::plan_smooth(&mut p),
        ["wiener", "moments"] => commands::plan_moments(&mut p),
        ["wiener", "quasi"] => commands::plan_quasi(&mut p),
        ["wiener", "lemma2"] => commands::plan_lemma2(&mut p),
        ["wiener", "lemma3"] => commands::plan_lemma3(&mut p),
        ["glue"] => commands::plan_glue(&mut p),
        ["audit-all"] => commands::plan_all(&mut p),
        other => return Err(CliError::Config(vec![format!("unknown subcommand `{}`", other.join(" "))])),
    };
    diags.extend(p.finish());
    if diags.is_empty() {
        Ok(Invocation { plan, out, format, threads, check })
    } else {
        Err(CliError::Config(diags))
    }
}

/// Runs a parsed command line, printing one `wrote` line per report.
pub fn run(m: &ArgMatches, stdout: &mut dyn Write) -> Result<(), CliError> {
    let inv = resolve(m)?;
    if inv.check {
        writeln!(stdout, "configuration ok").map_err(CliError::Io)?;
        return Ok(());
    }
    if let Some(n) = inv.threads {
        // A pool built earlier in the process stays in place.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let tables = commands::execute(&inv.plan)?;
    for path in output::write_tables(&tables, &inv.out, inv.format).map_err(CliError::Io)? {
        writeln!(stdout, "wrote {}", path.display()).map_err(CliError::Io)?;
    }
    Ok(())
}

/// Parses `args` (program name first) and runs; returns the process exit code.
pub fn main_with<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&matches, &mut std::io::stdout()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> ArgMatches {
        command().try_get_matches_from(std::iter::once("workbench").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn command_is_well_formed() {
        command().debug_assert();
    }

    #[test]
    fn global_flags_reach_nested_subcommands() {
        let inv = resolve(&parse(&["wiener", "moments", "--seed", "3", "--grid", "64", "--format", "json"])).unwrap();
        assert_eq!(inv.format, Format::Json);
        assert!(matches!(inv.plan, Plan::Moments { grid: 64, seed: 3, .. }));
        assert!(!inv.check);
    }

    #[test]
    fn exit_codes() {
        let Err(e) = resolve(&parse(&["smooth"])) else { panic!() };
        assert_eq!(e.exit_code(), 2);
        let budget = workbench_core::Error::BudgetExceeded { what: "words".into(), needed: 2, budget: 1 };
        assert_eq!(CliError::from(budget).exit_code(), 3);
    }

    #[test]
    fn check_skips_the_run() {
        let mut out = Vec::new();
        run(&parse(&["glue", "--seed", "1", "--check"]), &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "configuration ok\n");
    }
}
