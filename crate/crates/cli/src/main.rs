fn main() {
    std::process::exit(centerlab_cli::run_command(std::env::args_os()));
}
