fn main() {
    std::process::exit(pathquant_cli::run_cli(std::env::args_os()));
}
