fn main() {
    std::process::exit(mispr::cli::run(std::env::args_os()));
}
