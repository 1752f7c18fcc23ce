use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cjkit::{check_all, ctctd_model, format_ob_listing, parse_scenario, repro, run_scenario};

#[derive(Parser)]
#[command(name = "cjkit", version, about = "Finite models for CJ deontic logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a scenario's model and evaluate its check lines.
    Eval { file: PathBuf },
    /// Check conditions (1)-(4) on a scenario's model.
    Conditions {
        file: PathBuf,
        /// Also check condition (5).
        #[arg(long)]
        cond5: bool,
    },
    /// Close a scenario's seeds and report the result.
    Close {
        file: PathBuf,
        /// Close under condition (4) as well.
        #[arg(long)]
        cond4: bool,
        /// Close under condition (5) as well.
        #[arg(long)]
        cond5: bool,
        /// Print the closed obligation map, one context per line.
        #[arg(long)]
        print_ob: bool,
    },
    /// Run an embedded reference fixture.
    Repro {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(cjkit::fixture_names()))]
        name: String,
    },
}

/// Exit statuses: 0 success, 1 a check or condition failed, 2 bad input.
enum Failure {
    Checks,
    Input(String),
}

impl From<cjkit::Error> for Failure {
    fn from(e: cjkit::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn load(path: &Path) -> Result<cjkit::Scenario, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn verdict(ok: bool) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Eval { file } => {
            let report = run_scenario(&load(&file)?)?;
            print!("{}", report.render());
            verdict(report.success())
        }
        Command::Conditions { file, cond5 } => {
            let built = ctctd_model(&load(&file)?)?;
            let Some(model) = built.model else {
                println!("closure is inconsistent; no model to check");
                return Err(Failure::Checks);
            };
            let report = check_all(&model, cond5)?;
            if report.is_clean() {
                println!("all conditions satisfied");
            }
            for v in &report.violations {
                println!("{v}");
            }
            verdict(report.is_clean())
        }
        Command::Close {
            file,
            cond4,
            cond5,
            print_ob,
        } => {
            let mut scenario = load(&file)?;
            let mut options = scenario.effective_options().unwrap_or_default();
            options = options.with_close4(options.close4 || cond4);
            options = options.with_close5(options.close5 || cond5);
            scenario.options = Some(options);
            let report = run_scenario(&scenario)?;
            if print_ob {
                if let Some(model) = &report.model {
                    print!("{}", format_ob_listing(model)?);
                }
                for line in report.render().lines() {
                    eprintln!("{line}");
                }
            } else {
                print!("{}", report.render());
            }
            verdict(report.success())
        }
        Command::Repro { name } => {
            let report = repro(&name)?;
            println!("{report}");
            verdict(report.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
