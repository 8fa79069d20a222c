use qgeo_core::Executor;
use rayon::prelude::*;

/// Executor backed by a dedicated rayon pool.
///
/// Results come back in task order, so the worker count never changes
/// what a command writes.
pub struct Pool {
    pool: rayon::ThreadPool,
}

impl Pool {
    /// `workers = 0` lets rayon pick the number of threads.
    pub fn new(workers: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
        Ok(Self { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Pool {
    fn map<T, F>(&self, n: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(task).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_task_order() {
        let pool = Pool::new(4).unwrap();
        assert_eq!(pool.map(100, |i| i * i), (0..100).map(|i| i * i).collect::<Vec<_>>());
    }
}
