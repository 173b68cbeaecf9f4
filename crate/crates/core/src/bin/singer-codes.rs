fn main() {
    std::process::exit(singer_codes::cli::main());
}
