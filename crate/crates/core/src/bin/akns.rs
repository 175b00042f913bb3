fn main() {
    std::process::exit(akns::cli::main());
}
