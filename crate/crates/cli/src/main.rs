fn main() {
    std::process::exit(fpb_cli::run(std::env::args_os()));
}
