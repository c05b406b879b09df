fn main() {
    std::process::exit(slowdown::cli::run_cli(std::env::args_os()));
}
