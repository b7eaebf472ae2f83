fn main() {
    std::process::exit(sepdistill::cli::run(std::env::args_os()));
}
