fn main() {
    std::process::exit(lowsing_harness::cli::run(std::env::args_os()));
}
