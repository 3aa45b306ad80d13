fn main() {
    std::process::exit(qhash::cli::main_with_args(std::env::args_os()));
}
