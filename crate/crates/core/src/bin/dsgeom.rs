fn main() {
    std::process::exit(dsgeom::cli::run(std::env::args_os()));
}
