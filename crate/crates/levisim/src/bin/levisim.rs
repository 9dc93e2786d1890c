fn main() {
    std::process::exit(levisim::cli::run());
}
