fn main() {
    std::process::exit(mhdec::cli::run(std::env::args_os()));
}
