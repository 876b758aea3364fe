fn main() {
    std::process::exit(nhqa::cli::main_exit_code());
}
