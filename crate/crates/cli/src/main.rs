fn main() {
    std::process::exit(ntic_cli::app::run(std::env::args_os()));
}
