use carleman_cli::args::{execute, Cli};
use clap::Parser;

fn main() {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(text) => print!("{text}"),
        Err(failure) => {
            eprintln!("error: {failure}");
            std::process::exit(failure.exit_code());
        }
    }
}
