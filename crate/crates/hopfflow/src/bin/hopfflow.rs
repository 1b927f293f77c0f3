fn main() {
    std::process::exit(hopfflow::cli::run(std::env::args()));
}
