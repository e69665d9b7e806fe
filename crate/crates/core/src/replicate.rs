//! Deterministic replicate scheduling.
//!
//! Replicate `r` always draws from `RngStream::new(seed, r)`, and results
//! come back in replicate order, so the outcome does not depend on the
//! number of workers.

use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarlo {
    pub seed: u64,
    pub replicates: u64,
    pub workers: usize,
}

impl MonteCarlo {
    pub fn new(seed: u64, replicates: u64) -> Self {
        Self {
            seed,
            replicates,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    /// Runs `f` once per replicate and returns the results in replicate order.
    pub fn map<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &mut RngStream) -> T + Sync + Send,
    {
        map_replicates(self.seed, 0..self.replicates, self.workers, f)
    }
}

pub fn map_replicates<T, F>(seed: u64, range: std::ops::Range<u64>, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut RngStream) -> T + Sync + Send,
{
    let run = |r: u64| {
        let mut rng = RngStream::new(seed, r);
        f(r, &mut rng)
    };
    #[cfg(feature = "parallel")]
    if workers > 1 {
        use rayon::prelude::*;
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            return pool.install(|| range.into_par_iter().map(run).collect());
        }
    }
    let _ = workers;
    range.map(run).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn worker_count_does_not_change_results() {
        let f = |r: u64, rng: &mut RngStream| (r, rng.next_u64());
        let one = MonteCarlo::new(9, 200).map(f);
        let many = MonteCarlo::new(9, 200).with_workers(4).map(f);
        assert_eq!(one, many);
        assert!(one.iter().enumerate().all(|(i, (r, _))| *r == i as u64));
    }
}
