fn main() {
    std::process::exit(blockres::cli::run(std::env::args_os()));
}
