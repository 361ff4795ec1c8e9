fn main() {
    std::process::exit(troprank_cli::run(std::env::args_os()));
}
