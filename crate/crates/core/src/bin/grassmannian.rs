fn main() {
    std::process::exit(grassmannian::cli::main_with_args(std::env::args_os()));
}
