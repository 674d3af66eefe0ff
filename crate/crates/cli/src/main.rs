use std::process::ExitCode;

use superact_cli::output::THREADS_ENV;

fn main() -> ExitCode {
    let threads = std::env::var(THREADS_ENV).ok();
    match superact_cli::main_with_args(std::env::args_os(), threads.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(clap_err) = e.downcast_ref::<clap::Error>() {
                let _ = clap_err.print();
                return ExitCode::from(if clap_err.use_stderr() { 2 } else { 0 });
            }
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
