fn main() {
    std::process::exit(uamcas::cli::run_cli(std::env::args_os()));
}
