fn main() {
    std::process::exit(citefarm::cli::run(std::env::args_os()));
}
