use clap::Parser;
use multiphase::{commands, run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            if cli.json {
                println!("{summary}");
            } else {
                println!("{}", commands::describe(&summary));
            }
        }
        Err(e) => {
            log::error!("{e}");
            if cli.json {
                println!("{}", serde_json::json!({"error": e.to_string(), "exit_code": e.exit_code()}));
            }
            std::process::exit(e.exit_code());
        }
    }
}
