fn main() {
    std::process::exit(qaoa_constraints::cli::cli_main(std::env::args_os()));
}
