fn main() {
    std::process::exit(hyptri_cli::run(std::env::args_os()));
}
