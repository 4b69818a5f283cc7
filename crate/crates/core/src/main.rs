fn main() {
    std::process::exit(mfdim::cli::run());
}
