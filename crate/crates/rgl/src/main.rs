fn main() {
    std::process::exit(rgl::cli::run(std::env::args_os()));
}
