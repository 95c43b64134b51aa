fn main() {
    std::process::exit(lonelybus::cli::run(std::env::args_os()));
}
