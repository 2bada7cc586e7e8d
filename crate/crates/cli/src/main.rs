use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use latticebands_cli::args::Cli;
use latticebands_cli::run;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LATTICEBANDS_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let config = cli.into_config();
    match run(&config) {
        Ok(outcome) => {
            if config.out.is_none() {
                let mut stdout = std::io::stdout().lock();
                if stdout.write_all(outcome.report.as_bytes()).is_err() {
                    return ExitCode::from(2);
                }
            }
            if let Some(f) = &outcome.finding {
                eprintln!("latticebands: {f}");
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("latticebands: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
