fn main() {
    std::process::exit(nlcert::cli::run(std::env::args_os()));
}
