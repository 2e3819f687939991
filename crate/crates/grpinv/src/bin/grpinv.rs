fn main() -> std::process::ExitCode {
    grpinv::cli::run()
}
