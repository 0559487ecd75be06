fn main() {
    std::process::exit(qpskew::cli::main_with(std::env::args()));
}
