fn main() {
    std::process::exit(photon_current::cli::run(std::env::args_os()));
}
