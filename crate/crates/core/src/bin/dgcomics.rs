fn main() {
    std::process::exit(dgcomics::cli::run(std::env::args_os()));
}
