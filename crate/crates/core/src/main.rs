fn main() {
    std::process::exit(degdiv::cli::run(std::env::args_os()));
}
