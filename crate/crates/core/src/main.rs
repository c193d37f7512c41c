fn main() {
    std::process::exit(tdesim::cli::run(std::env::args_os()));
}
