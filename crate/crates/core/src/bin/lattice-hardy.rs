fn main() {
    std::process::exit(lattice_hardy::cli::run(std::env::args_os()));
}
