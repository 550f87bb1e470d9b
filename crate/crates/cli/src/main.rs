use clap::Parser;

use lcf_risk_cli::args::Cli;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match lcf_risk_cli::run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            lcf_risk_cli::exit_code(&err)
        }
    };
    std::process::exit(code);
}
