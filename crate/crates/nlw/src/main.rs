use std::process::ExitCode;

use clap::Parser;
use penrose_nlw::cli::Cli;
use penrose_nlw::experiments::run;
use penrose_nlw::Experiment;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let cfg = match cli.resolve() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&cfg, &mut |line| println!("{line}")) {
        Ok(outcome) => {
            // verify has already printed one line per criterion
            let listed = cfg.experiment != Experiment::Verify;
            for (name, v) in outcome.report.verdicts.iter().filter(|_| listed) {
                println!(
                    "{} {name}: {}",
                    if v.passed { "PASS" } else { "FAIL" },
                    v.tolerance
                );
            }
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
