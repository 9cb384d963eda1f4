fn main() {
    std::process::exit(ladder_cs::cli::run(std::env::args_os()));
}
