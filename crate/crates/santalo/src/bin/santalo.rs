fn main() {
    std::process::exit(santalo::cli::run(std::env::args_os()));
}
