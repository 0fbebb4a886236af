fn main() {
    std::process::exit(hecke_norm::cli::main_entry());
}
