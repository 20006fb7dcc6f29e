fn main() {
    std::process::exit(figure_integral::cli::run(std::env::args_os()));
}
