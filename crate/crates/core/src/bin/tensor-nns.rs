fn main() {
    std::process::exit(tensor_nns::cli::main_with_args(std::env::args_os()));
}
