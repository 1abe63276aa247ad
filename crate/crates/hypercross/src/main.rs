fn main() {
    std::process::exit(hypercross::cli::run(std::env::args_os()));
}
