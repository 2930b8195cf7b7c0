fn main() {
    std::process::exit(trackside::cli::run(std::env::args_os()));
}
