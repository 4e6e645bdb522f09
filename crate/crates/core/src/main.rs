fn main() {
    std::process::exit(waylab::cli::main_with_args(std::env::args_os()));
}
