fn main() {
    std::process::exit(andor::cli::main_with_args(std::env::args_os()));
}
