//! Cell-execution abstraction for grid sweeps.
//!
//! Grid analyses hand out independent cells indexed 0..n and assemble the
//! results in index order, so the output never depends on the scheduling of
//! the executor. The core ships a serial executor; parallel front ends plug
//! in their own (e.g. a work-stealing pool) behind the same contract.

use alloc::vec::Vec;

/// Executes `n` independent cell evaluations and returns results in index
/// order. Implementations must call `f` exactly once per index.
pub trait Executor: Sync {
    fn run_cells<T: Send>(&self, n: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T>;
}

/// Runs cells one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct SerialExecutor;

impl Executor for SerialExecutor {
    fn run_cells<T: Send>(&self, n: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
        (0..n).map(f).collect()
    }
}
