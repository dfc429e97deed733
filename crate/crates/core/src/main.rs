fn main() {
    std::process::exit(implied_svm::cli::run(std::env::args_os()));
}
