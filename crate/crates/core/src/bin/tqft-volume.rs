fn main() {
    std::process::exit(tqft_volume::cli::main_with_args(std::env::args_os()));
}
