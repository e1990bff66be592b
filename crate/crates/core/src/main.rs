fn main() {
    std::process::exit(hnslab::experiments::run_cli(std::env::args_os()));
}
