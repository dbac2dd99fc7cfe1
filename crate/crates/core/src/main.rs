fn main() {
    std::process::exit(holdercrf::cli::run(std::env::args_os()));
}
