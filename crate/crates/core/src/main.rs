fn main() {
    std::process::exit(discflux::cli::main_with(std::env::args_os()));
}
