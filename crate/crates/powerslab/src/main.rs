fn main() {
    std::process::exit(powerslab::cli::run_main());
}
