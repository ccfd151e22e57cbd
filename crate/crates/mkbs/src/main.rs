fn main() {
    std::process::exit(mkbs::cli::main());
}
