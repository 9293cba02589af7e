fn main() {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let stdout = std::io::stdout();
    let code = ils_core::cli::run(std::env::args_os(), &mut stdout.lock());
    std::process::exit(code);
}
