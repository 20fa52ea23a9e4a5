fn main() {
    std::process::exit(ensemble_forge::cli::run(std::env::args_os()));
}
