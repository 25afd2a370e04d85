use std::io::Write;

fn main() {
    let seed = std::env::var("NCMF_SEED").ok();
    let outcome = ncmf::cli::run_args(std::env::args_os(), seed.as_deref());
    let mut out = std::io::stdout().lock();
    if out.write_all(outcome.stdout.as_bytes()).and_then(|()| out.flush()).is_err() {
        std::process::exit(2);
    }
    std::process::exit(outcome.code);
}
