fn main() {
    std::process::exit(mwelex::cli::run(std::env::args_os()));
}
