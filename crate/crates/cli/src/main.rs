use clap::Parser;
use navcon_cli::commands::{self, Cli, Command};

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Run(args) => commands::run(&args, &mut out).map(|_| ()),
        Command::Eval(args) => commands::eval(&args, &mut out),
        Command::Serve(args) => commands::serve(&args),
    }
}
