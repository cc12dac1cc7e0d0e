use std::process::ExitCode;

use clap::Parser;

use qhlab::config::{parse_config, schema_help};

#[derive(Parser, Debug)]
#[command(name = "qhlab", version, about = "Quantum-hydrodynamics lab batch driver")]
#[command(override_usage = "qhlab <COMMAND> [--config FILE] [--key value ...] --out DIR")]
#[command(after_help = "Keys per command:")]
struct Cli {
    /// evolve | instability | quantize | angular | validate
    command: String,
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    args: Vec<String>,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    if argv.len() <= 1 || argv.iter().skip(1).any(|a| a == "--help" || a == "-h") {
        let mut cmd = <Cli as clap::CommandFactory>::command().after_help(format!("Keys per command:{}", schema_help()));
        let _ = cmd.print_help();
        return ExitCode::from(if argv.len() <= 1 { 2 } else { 0 });
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cfg = match parse_config(&cli.command, &cli.args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qhlab: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    ExitCode::from(qhlab::run(&cfg) as u8)
}
