fn main() {
    std::process::exit(flatcheck::cli::main_with_args(std::env::args_os()));
}
