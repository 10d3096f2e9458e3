fn main() {
    std::process::exit(firmdyn::cli::main());
}
