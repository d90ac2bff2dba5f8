use std::process::ExitCode;

fn main() -> anyhow::Result<ExitCode> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init()?;
    let code = maltmap::cli::run_subcommand(std::env::args_os());
    Ok(ExitCode::from(u8::try_from(code)?))
}
