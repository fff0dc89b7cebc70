fn main() {
    std::process::exit(delsarte_cli::run(std::env::args_os()));
}
