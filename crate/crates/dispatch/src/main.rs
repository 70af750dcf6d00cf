fn main() {
    std::process::exit(dispatch::cli::main());
}
