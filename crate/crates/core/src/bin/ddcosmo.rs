fn main() -> std::process::ExitCode {
    ddcosmo::cli::main_entry()
}
