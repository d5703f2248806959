fn main() {
    std::process::exit(imbf_cli::cli::run());
}
