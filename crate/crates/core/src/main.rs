fn main() {
    std::process::exit(equisum::cli::run_from_env());
}
