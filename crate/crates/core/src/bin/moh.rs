fn main() {
    std::process::exit(moh::cli::run(std::env::args_os()));
}
