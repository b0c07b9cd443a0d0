//! Rayon-backed [`SampleMap`].

use penrose_nlw_core::ensemble::SampleMap;
use rayon::prelude::*;

/// Maps sample indices on a rayon pool; results come back in index order,
/// so estimators reduce them exactly as the sequential mapper would.
#[derive(Debug)]
pub struct Parallel {
    pool: Option<rayon::ThreadPool>,
}

impl Parallel {
    /// `workers = 0` uses the global rayon pool.
    pub fn new(workers: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = match workers {
            0 => None,
            n => Some(rayon::ThreadPoolBuilder::new().num_threads(n).build()?),
        };
        Ok(Self { pool })
    }
}

impl SampleMap for Parallel {
    fn map_indices<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        let run = || (0..count).into_par_iter().map(&f).collect();
        match &self.pool {
            Some(pool) => pool.install(run),
            None => run(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use penrose_nlw_core::ensemble::Sequential;

    #[test]
    fn matches_sequential_order() {
        let f = |i: usize| (i as f64).sin() * 1e3;
        for workers in [0, 1, 3] {
            let par = Parallel::new(workers).unwrap().map_indices(257, f);
            assert_eq!(par, Sequential.map_indices(257, f));
        }
    }
}
