fn main() {
    std::process::exit(pform_cli::run(std::env::args_os()));
}
