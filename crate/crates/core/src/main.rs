fn main() {
    std::process::exit(oblivgm::cli::run_from(std::env::args_os()));
}
