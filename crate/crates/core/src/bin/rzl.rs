use std::io::{stderr, stdout};

fn main() {
    if let Some(n) = std::env::var("RZL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let code = rzl_core::cli::main_with_args(std::env::args_os(), &mut stdout().lock(), &mut stderr().lock());
    std::process::exit(code);
}
