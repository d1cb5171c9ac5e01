fn main() {
    std::process::exit(dicke_witness::cli::run(std::env::args_os()));
}
