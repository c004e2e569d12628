fn main() {
    std::process::exit(lcp_bounds::cli::run_from_env());
}
