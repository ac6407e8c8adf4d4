fn main() {
    std::process::exit(piezostab::cli::run(std::env::args_os()));
}
