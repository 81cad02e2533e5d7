fn main() {
    std::process::exit(labelrefine::cli::main_with_args(std::env::args_os()));
}
