fn main() {
    std::process::exit(puppyflow_cli::run(std::env::args_os()));
}
