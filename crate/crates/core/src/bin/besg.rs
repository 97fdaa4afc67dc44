use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = besg::cli::run(std::env::args_os());
    print!("{}", result.output);
    std::io::stdout().flush().ok();
    if let Some(e) = &result.error {
        eprintln!("{e}");
    }
    ExitCode::from(result.exit_code as u8)
}
