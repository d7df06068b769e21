use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use fwdbayes::cli::{run, Cli};
use fwdbayes::error::{ErrorRecord, EXIT_STRICT_FAILURE};

fn emit(record: &ErrorRecord) {
    eprintln!("{}", serde_json::to_string(record).expect("error records serialize"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            emit(&ErrorRecord { error: "usage", field: None, message: e.render().to_string(), exit_code: 2 });
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            match outcome.strict_failure {
                Some(message) => {
                    emit(&ErrorRecord { error: "strict", field: None, message, exit_code: EXIT_STRICT_FAILURE });
                    ExitCode::from(EXIT_STRICT_FAILURE as u8)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            let record = e.record();
            emit(&record);
            ExitCode::from(record.exit_code as u8)
        }
    }
}
