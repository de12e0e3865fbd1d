use std::io;

use clap::Parser;

use qmds::cli::{run, Cli};

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    let code = run(&cli, &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(code);
}
