fn main() {
    std::process::exit(hoferlike_cli::main_with_args(std::env::args_os()));
}
