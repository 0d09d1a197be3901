fn main() {
    std::process::exit(normplane::cli::main_with(std::env::args_os()));
}
