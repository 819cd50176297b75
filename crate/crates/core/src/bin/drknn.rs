fn main() {
    std::process::exit(drknn::cli::run(std::env::args_os()));
}
