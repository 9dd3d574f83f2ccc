fn main() {
    std::process::exit(lp_recovery::cli::dispatch(std::env::args_os()));
}
