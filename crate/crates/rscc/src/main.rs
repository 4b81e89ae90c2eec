fn main() {
    std::process::exit(rscc::run(std::env::args_os()));
}
