fn main() -> std::process::ExitCode {
    unleft::cli::main()
}
