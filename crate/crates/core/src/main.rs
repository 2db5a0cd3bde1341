fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(asg1_core::harness::cli_dispatch(&args));
}
