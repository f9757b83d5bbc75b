fn main() {
    env_logger::init();
    std::process::exit(ica_emk_cli::main_with_args(std::env::args_os()));
}
