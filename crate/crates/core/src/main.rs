fn main() {
    std::process::exit(antisym_core::cli::run(std::env::args_os()));
}
