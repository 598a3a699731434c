fn main() {
    std::process::exit(sepvote::cli::dispatch(std::env::args_os()));
}
