fn main() {
    std::process::exit(ratiolab::cli::main_from(std::env::args_os()));
}
