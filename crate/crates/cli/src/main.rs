fn main() {
    std::process::exit(normforge_cli::run(std::env::args_os()));
}
