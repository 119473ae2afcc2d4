use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RISKGAME_LOG", "warn")).init();
    ExitCode::from(riskgame::cli::run(std::env::args_os()))
}
