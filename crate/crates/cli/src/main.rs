use std::path::PathBuf;
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgMatches, Command};
use qsim_cli::{normalized_toml, resolve_params, run_experiment, write_outputs, CliError, Experiment};

fn run_args(cmd: Command) -> Command {
    cmd.arg(Arg::new("config").long("config").value_name("PATH").value_parser(value_parser!(PathBuf)).help("TOML parameter file"))
        .arg(Arg::new("seed").long("seed").value_name("U64").value_parser(value_parser!(u64)).default_value("1").help("random seed"))
        .arg(Arg::new("out").long("out").value_name("DIR").value_parser(value_parser!(PathBuf)).help("output directory [default: results/<experiment>]"))
        .arg(
            Arg::new("threads")
                .long("threads")
                .value_name("N")
                .value_parser(value_parser!(usize))
                .default_value("0")
                .help("worker threads; 0 uses every core, 1 gives bit-identical reruns"),
        )
}

fn cli() -> Command {
    let mut cmd = Command::new("qsim")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Reproducible quantum-simulation experiments")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for e in Experiment::ALL {
        cmd = cmd.subcommand(run_args(Command::new(e.name()).about(format!("run the {} experiment", e.name()))));
    }
    cmd.subcommand(
        Command::new("validate")
            .about("check a config file and print it with defaults filled in")
            .arg(Arg::new("experiment").required(true).value_parser(Experiment::ALL.map(|e| e.name())))
            .arg(Arg::new("config").long("config").value_name("PATH").value_parser(value_parser!(PathBuf)).required(true)),
    )
    .subcommand(Command::new("list").about("list experiments and their parameters"))
}

fn list() {
    for e in Experiment::ALL {
        println!("{}", e.name());
        for s in e.specs() {
            println!("  {:<22} {:<16} default {:<28} {}", s.key, s.kind.to_string(), (s.default)().to_json().to_string(), s.doc);
        }
    }
}

fn execute(name: &str, m: &ArgMatches) -> Result<bool, CliError> {
    let experiment = Experiment::from_name(name)?;
    let params = resolve_params(experiment, m.get_one::<PathBuf>("config").map(PathBuf::as_path))?;
    let seed = *m.get_one::<u64>("seed").expect("defaulted");
    let threads = *m.get_one::<usize>("threads").expect("defaulted");
    let out = m.get_one::<PathBuf>("out").cloned().unwrap_or_else(|| PathBuf::from("results").join(name));
    let report = run_experiment(experiment, &params, seed, threads)?;
    write_outputs(&out, name, seed, threads, &params, &report)?;
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag}  {}  ({})", c.name, c.detail);
    }
    println!("outputs written to {}", out.display());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let result = match matches.subcommand() {
        Some(("list", _)) => {
            list();
            Ok(true)
        }
        Some(("validate", m)) => {
            let name = m.get_one::<String>("experiment").expect("required");
            Experiment::from_name(name)
                .and_then(|e| resolve_params(e, m.get_one::<PathBuf>("config").map(PathBuf::as_path)))
                .map(|p| {
                    print!("{}", normalized_toml(name, &p));
                    true
                })
        }
        Some((name, m)) => execute(name, m),
        None => unreachable!("subcommand required"),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
