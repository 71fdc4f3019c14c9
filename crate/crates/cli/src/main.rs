fn main() {
    // die quietly when a pipe closes early (head, grep -m1, ...)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(lieopt_cli::run(std::env::args().collect()));
}
