fn main() {
    std::process::exit(pmcgeom::cli::run(std::env::args_os()));
}
