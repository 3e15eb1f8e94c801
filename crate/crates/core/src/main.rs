fn main() {
    std::process::exit(fockcodes::cli::main_with_args(std::env::args_os()));
}
