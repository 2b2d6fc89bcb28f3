//! `qd3` command-line entry point; see [`qd3::cli`].

fn main() {
    std::process::exit(qd3::cli::run(std::env::args_os()));
}
