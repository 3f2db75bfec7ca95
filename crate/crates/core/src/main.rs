fn main() {
    std::process::exit(bayes_welfare::cli::main());
}
