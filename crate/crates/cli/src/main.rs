fn main() {
    std::process::exit(bmdist_cli::run(std::env::args_os()));
}
