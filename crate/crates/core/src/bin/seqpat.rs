fn main() {
    std::process::exit(seqpat::cli::main_with_args());
}
