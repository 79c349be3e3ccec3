fn main() {
    std::process::exit(spinbath_harness::run_cli(std::env::args_os()));
}
