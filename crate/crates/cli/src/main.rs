fn main() {
    std::process::exit(selfpolar_cli::run(std::env::args_os()));
}
