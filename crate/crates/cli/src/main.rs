use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use hermult::{emit, run, Cli, ErrorObject, SCHEMA};

fn fail(object: &ErrorObject, code: u8) -> ExitCode {
    eprintln!("{}", serde_json::to_string(object).expect("error object serializes"));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string().trim().to_string();
            let object = ErrorObject { schema: SCHEMA, error: "config", message, hypothesis: None };
            return fail(&object, 2);
        }
    };
    match run(&cli.command).and_then(|bytes| emit(&cli.command, &bytes)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e.to_object(), e.exit_code() as u8),
    }
}
