use clap::Parser;
use xsrisk::{run, Cli, CliError, OUT_ENV};

fn main() {
    let cli = Cli::parse();
    match run(&cli, std::env::var(OUT_ENV).ok()) {
        Ok(out) => print!("{}", out.stdout),
        Err(e) => {
            eprintln!("xsrisk: {e}");
            if let CliError::Usage(_) = e {
                eprintln!("run `xsrisk --help` for usage");
            }
            std::process::exit(e.exit_code());
        }
    }
}
