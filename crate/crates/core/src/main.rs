fn main() {
    std::process::exit(fpe_similarity::cli::main_with_args(std::env::args_os()));
}
