fn main() {
    std::process::exit(confounders::cli::cli_main(std::env::args_os()));
}
