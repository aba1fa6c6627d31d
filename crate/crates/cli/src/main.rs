use std::process::ExitCode;

fn main() -> ExitCode {
    erc7634_cli::main_entry()
}
