fn main() { std::process::exit(dirac_series::cli::run(std::env::args().skip(1))); }
