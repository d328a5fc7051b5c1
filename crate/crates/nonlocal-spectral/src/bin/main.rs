use nonlocal_spectral::cli;

fn main() {
    std::process::exit(cli::run(std::env::args()));
}
