fn main() -> std::process::ExitCode {
    ppsat_cli::main_with(None)
}
