use clap::Parser;

use grover_domset::cli::{run, Cli};

fn main() {
    // die quietly when stdout is a closed pipe (e.g. `... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(run(Cli::parse()));
}
