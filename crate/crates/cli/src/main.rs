fn main() {
    std::process::exit(spt_cli::run(std::env::args_os()));
}
