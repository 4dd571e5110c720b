fn main() -> std::process::ExitCode {
    lr_quantum::cli::main()
}
