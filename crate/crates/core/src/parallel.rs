//! Thread-count plumbing shared by the scan and counting paths.

/// `0` means "use available parallelism".
pub fn resolve_threads(threads: usize) -> usize {
    if threads == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        threads
    }
}

pub(crate) fn is_sequential(threads: usize) -> bool {
    resolve_threads(threads) == 1
}

/// Runs `f` inside a rayon pool with the requested number of workers.
pub(crate) fn run<R, F>(threads: usize, f: F) -> R
where
    F: FnOnce() -> R + Send,
    R: Send,
{
    match rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_threads(threads))
        .build()
    {
        Ok(pool) => pool.install(f),
        // fall back to the global pool
        Err(_) => f(),
    }
}
