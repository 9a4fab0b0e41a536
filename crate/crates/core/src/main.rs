use std::io;

fn main() {
    if let Some(threads) = std::env::var("KRPHASE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // Ignore failure: the pool may already be initialized.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let code = krphase::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
