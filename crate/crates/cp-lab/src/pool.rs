//! Deterministic trial execution.
//!
//! Trial `i` always draws from `trial_rng(master, i)` and results come back
//! in index order, so output is identical for any thread count.

use rayon::prelude::*;

use cplab_core::rng::{trial_rng, SimRng};

pub const THREADS_ENV: &str = "CP_LAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialPool {
    threads: usize,
}

impl Default for TrialPool {
    fn default() -> Self {
        TrialPool::from_env()
    }
}

impl TrialPool {
    pub fn new(threads: usize) -> Self {
        TrialPool { threads: threads.max(1) }
    }

    pub fn sequential() -> Self {
        TrialPool::new(1)
    }

    /// Thread count from `CP_LAB_THREADS`, else the number of CPUs.
    pub fn from_env() -> Self {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        TrialPool::new(threads)
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// Runs `f(i, rng_i)` for `i in 0..n`.
    pub fn run<T, F>(&self, n: usize, master: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &mut SimRng) -> T + Sync,
    {
        let job = |i: usize| f(i, &mut trial_rng(master, i as u64));
        if self.threads == 1 {
            return (0..n).map(job).collect();
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .expect("thread pool")
            .install(|| (0..n).into_par_iter().map(job).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn thread_count_does_not_change_results() {
        let f = |i: usize, rng: &mut SimRng| (i, rng.gen::<u64>());
        let a = TrialPool::sequential().run(500, 9, f);
        let b = TrialPool::new(4).run(500, 9, f);
        assert_eq!(a, b);
    }
}
