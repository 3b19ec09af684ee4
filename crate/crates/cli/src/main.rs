fn main() {
    std::process::exit(locglob_cli::run(std::env::args_os()));
}
