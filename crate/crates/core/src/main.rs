fn main() {
    std::process::exit(siegel_restrict::cli::main_with_args(std::env::args_os()));
}
