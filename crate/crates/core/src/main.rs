fn main() {
    std::process::exit(entrofunc::cli::run());
}
