fn main() {
    std::process::exit(sinetype_cli::run(std::env::args_os()));
}
