fn main() {
    std::process::exit(betascan::main_with_args(std::env::args_os()));
}
