fn main() {
    std::process::exit(balens::cli::run(std::env::args_os()));
}
