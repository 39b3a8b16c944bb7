//! Execution backend for the data-parallel loops.
//!
//! Work is always cut into the same fixed-size chunks and partial results are
//! combined in chunk order, so sequential and parallel runs agree bit for bit.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Terms per chunk for long sums.
pub const CHUNK: u64 = 1 << 14;

/// How the data-parallel loops run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

impl Execution {
    /// Map `f` over `items`, preserving order.
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(f).collect(),
        }
    }

    /// Map `f` over `0..count`, preserving order.
    pub fn map_range<U, F>(self, count: usize, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..count).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..count).into_par_iter().map(f).collect(),
        }
    }

    /// Sum `term(k)` for `k` in `start..end`.
    ///
    /// The range is split at multiples of [`CHUNK`]; each chunk is summed
    /// sequentially and the chunk sums are added in index order.
    pub fn sum_terms<F>(self, start: u64, end: u64, term: F) -> f64
    where
        F: Fn(u64) -> f64 + Sync + Send,
    {
        if end <= start {
            return 0.0;
        }
        let first = start / CHUNK;
        let last = (end - 1) / CHUNK;
        let bounds: Vec<(u64, u64)> =
            (first..=last).map(|c| ((c * CHUNK).max(start), ((c + 1) * CHUNK).min(end))).collect();
        let partial = self.map(&bounds, |&(lo, hi)| (lo..hi).map(&term).sum::<f64>());
        partial.into_iter().sum()
    }
}
