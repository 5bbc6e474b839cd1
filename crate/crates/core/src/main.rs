fn main() {
    std::process::exit(g2cone::cli::main_with_args(std::env::args_os()));
}
