use std::io::Write;

fn main() {
    let out = ggp_tool::run(std::env::args_os());
    // A closed pipe downstream is not our failure.
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    std::process::exit(out.code);
}
