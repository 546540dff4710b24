use clap::Parser;

use singingbot_cli::{commands, Cli};

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    commands::run(&cli.globals, cli.command)
}
