fn main() -> std::process::ExitCode {
    wzw_ope::cli::run(std::env::args_os())
}
