use clap::error::ErrorKind;
use clap::Parser;

use effham::cli::{init_logging, run, CliConfig};

fn main() {
    init_logging();
    let config = match CliConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(run(config));
}
