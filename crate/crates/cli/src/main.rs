fn main() {
    std::process::exit(ratho_cli::run());
}
