fn main() {
    std::process::exit(plp_cli::run(std::env::args_os()));
}
