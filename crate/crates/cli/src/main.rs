fn main() {
    std::process::exit(fqnoise_cli::run_cli(std::env::args_os()));
}
