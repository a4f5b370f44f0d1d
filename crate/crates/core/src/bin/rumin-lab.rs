fn main() {
    std::process::exit(rumin_lab::cli::main_with_args(std::env::args_os()));
}
