//! Work-stealing executor plugged into the core sweep contract.

use phasetip_core::exec::Executor;
use rayon::prelude::*;

/// Runs cells on a rayon pool; results are collected in index order, so the
/// output is byte-identical for any worker count.
pub struct RayonExecutor;

impl Executor for RayonExecutor {
    fn run_cells<T: Send>(&self, n: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
        (0..n).into_par_iter().map(f).collect()
    }
}

/// Build the global rayon pool with the requested worker count (0 keeps the
/// library default). `PHASETIP_WORKERS` supplies the default when the flag
/// is absent.
pub fn init_workers(workers: Option<usize>) {
    let n = workers.or_else(|| {
        std::env::var("PHASETIP_WORKERS").ok().and_then(|v| v.parse().ok())
    });
    if let Some(n) = n {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}
