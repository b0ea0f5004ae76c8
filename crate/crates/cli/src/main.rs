fn main() {
    std::process::exit(workbench_cli::main_with(std::env::args_os()));
}
