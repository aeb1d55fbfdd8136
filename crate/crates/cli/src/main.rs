use std::io::Write;

use clap::Parser;
use structdiag_cli::{run, Cli};

fn main() {
    let outcome = run(Cli::parse());
    if !outcome.stdout.is_empty() {
        // a closed pipe (`| head`) is not an error worth reporting
        let _ = writeln!(std::io::stdout().lock(), "{}", outcome.stdout);
    }
    if let Some(message) = &outcome.message {
        eprintln!("structdiag: {message}");
    }
    std::process::exit(outcome.code);
}
