fn main() {
    std::process::exit(loggw::cli::run(std::env::args_os()));
}
