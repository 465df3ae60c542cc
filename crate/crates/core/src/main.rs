fn main() {
    std::process::exit(cot_flow::cli::run_cli(std::env::args_os()));
}
