fn main() {
    std::process::exit(levy_moments::cli::main_with_args(std::env::args_os()));
}
