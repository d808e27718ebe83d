fn main() -> std::process::ExitCode {
    mms_core::cli::main()
}
