mod args;
mod commands;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Mode};
use report::{Envelope, Output};

const EXIT_ASSERTION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let threads = cli.global.threads.unwrap_or(0);
    if threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let start = Instant::now();
    let result = if threads == 1 {
        redeilab::par::sequential(|| commands::run(&cli))
    } else {
        commands::run(&cli)
    };
    let ms = start.elapsed().as_millis() as u64;
    let out = match result {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e:#}");
            let budget = e
                .downcast_ref::<redeilab::classify::ClassifyError>()
                .is_some_and(|c| matches!(c, redeilab::classify::ClassifyError::BudgetExceeded { .. }));
            return ExitCode::from(if budget { EXIT_BUDGET } else { EXIT_USAGE });
        }
    };
    let env = Envelope::new(&cli, (!cli.global.no_timing).then_some(ms), &out);
    if let Err(e) = report::emit(&cli.global, &env, &out) {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    report_failures(&cli, &out)
}

fn report_failures(cli: &Cli, out: &Output) -> ExitCode {
    for f in &out.failures {
        eprintln!("assertion failed: {f}");
    }
    if cli.global.mode == Mode::Assert && !out.failures.is_empty() {
        ExitCode::from(EXIT_ASSERTION)
    } else {
        ExitCode::SUCCESS
    }
}
