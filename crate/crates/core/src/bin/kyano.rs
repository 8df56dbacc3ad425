fn main() {
    std::process::exit(kyano::cli::run(std::env::args_os()));
}
