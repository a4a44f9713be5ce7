fn main() {
    std::process::exit(bcc_lab::cli::run(std::env::args_os()));
}
