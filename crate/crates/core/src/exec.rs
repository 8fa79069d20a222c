//! Task execution hook so drivers can run independent tasks in parallel.

use alloc::vec::Vec;

/// Runs `n` independent tasks and returns their results in index order.
pub trait Executor: Sync {
    fn map<T, F>(&self, n: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs tasks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, n: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(task).collect()
    }
}
