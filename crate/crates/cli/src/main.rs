fn main() {
    std::process::exit(polyscribe_cli::run(std::env::args_os()));
}
