fn main() {
    std::process::exit(fnconf_cli::run(std::env::args_os()));
}
