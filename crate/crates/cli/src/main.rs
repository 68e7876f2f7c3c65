fn main() {
    std::process::exit(casimir_mag::run(std::env::args_os()));
}
