fn main() {
    std::process::exit(dmlat::cli::run(std::env::args_os()));
}
