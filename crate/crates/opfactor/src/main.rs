fn main() {
    std::process::exit(opfactor::cli::run());
}
