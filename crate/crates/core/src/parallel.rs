//! Execution strategy for data-parallel loops.
//!
//! With the `parallel` feature, [`Execution::Parallel`] runs on the rayon
//! pool that is current at the call site; without it, both strategies run
//! sequentially. Results are always collected in index order, so output never
//! depends on the strategy or the number of workers.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this strategy actually fans out in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// `f(i)` for `i in 0..n`, in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Splits `0..total` into contiguous chunks of at most `chunk` units and
    /// maps each chunk; outputs are in chunk order.
    pub fn map_chunks<T, F>(self, total: u64, chunk: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<u64>) -> T + Sync + Send,
    {
        let chunk = chunk.max(1);
        let count = total.div_ceil(chunk) as usize;
        self.map(count, |c| {
            let start = c as u64 * chunk;
            f(start..(start + chunk).min(total))
        })
    }
}
