fn main() {
    std::process::exit(rothcheck::cli::main_entry());
}
