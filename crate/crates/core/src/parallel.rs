/// Runs `op` on a dedicated rayon pool with `jobs` worker threads
/// (`jobs == 0` means one per CPU).
pub fn run<T: Send>(jobs: usize, op: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(op),
        Err(e) => {
            log::warn!("could not build a {}-thread pool ({}); using the global pool", jobs, e);
            op()
        }
    }
}
