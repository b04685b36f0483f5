fn main() {
    std::process::exit(mtbound::cli::main_with_args(std::env::args_os()));
}
