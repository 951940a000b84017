fn main() {
    std::process::exit(ising_bounds::cli::run(std::env::args_os()));
}
