fn main() -> std::process::ExitCode {
    exitlab::cli::main()
}
