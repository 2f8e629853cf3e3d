use std::process::ExitCode;

use clap::Parser;
use sphere_ineq_cli::args::Cli;
use sphere_ineq_cli::run;

fn main() -> ExitCode {
    let outcome = Cli::parse().into_config().and_then(|cfg| run(&cfg));
    match outcome {
        Ok(o) => {
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            println!("{}", o.summary);
            if o.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("sphere-ineq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
