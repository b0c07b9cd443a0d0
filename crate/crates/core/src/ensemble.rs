//! Index-ordered mapping over Monte Carlo samples.
//!
//! Estimators call [`SampleMap::map_indices`] and reduce the returned
//! vector in index order, so results do not depend on how an implementation
//! schedules the work.

use alloc::vec::Vec;

pub trait SampleMap {
    /// `(0..count).map(f)`, collected in index order.
    fn map_indices<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs every sample on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl SampleMap for Sequential {
    fn map_indices<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(f).collect()
    }
}
