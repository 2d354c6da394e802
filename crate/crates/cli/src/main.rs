use clap::Parser;

use normal_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(report) => report,
        Err(usage) => {
            eprintln!("error: {usage}");
            std::process::exit(2);
        }
    };
    match &report.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &report.body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                std::process::exit(2);
            }
        }
        None => print!("{}", report.body),
    }
    std::process::exit(report.exit_code);
}
