use ppsat_core::transport::Role;

fn main() -> std::process::ExitCode {
    ppsat_cli::main_with(Some(Role::Provider))
}
