fn main() {
    std::process::exit(calgeom::cli::run(std::env::args_os()));
}
