fn main() {
    std::process::exit(pacs::cli::run(std::env::args_os()));
}
