fn main() {
    std::process::exit(torusvc::cli::run(std::env::args_os()));
}
