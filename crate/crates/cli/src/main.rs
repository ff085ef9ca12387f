fn main() {
    std::process::exit(ccodes::main_with_args(std::env::args_os()));
}
