fn main() {
    std::process::exit(fekete_sphere::cli::run(std::env::args_os()));
}
